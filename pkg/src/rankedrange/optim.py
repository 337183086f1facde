"""Trainers: difference-of-convex descent on ranked-range objectives,
validation-driven threshold learning, the combined sample/label minimax
updates, an average-loss baseline, and the adaptive-k schedule.

All trainers are deterministic functions of (data, config.seed).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import RankedRange, _as_values, sort_descending
from .data import Dataset
from .losses import (
    MarginLossKind,
    margin_loss_vec,
)
from .model import LinearModel


class TrainingDiverged(ArithmeticError):
    """Raised when a trainer's objective goes non-finite."""

    def __init__(self, epoch: int):
        super().__init__(f"objective became non-finite at epoch {epoch}")
        self.epoch = epoch


@dataclass(frozen=True)
class TrainConfig:
    m: int = 0
    k: int = 0  # 0 means "use n", resolved at train time
    kprime: int = 1
    C: float = 1e4
    eta_outer: float = 0.1
    eta_inner: float = 0.01
    outer_epochs: int = 5
    inner_epochs: int = 1000
    warmup_epochs: int = 100
    batch: int = 1  # 1 = pure stochastic, 0 = full batch
    seed: int = 0
    patience: int = 3
    refresh_every: int = 10
    use_bias: bool = True
    init_scale: float = 0.0  # stddev of the random start (0 = zero init)

    def __post_init__(self):
        if self.C <= 0 or self.eta_outer <= 0 or self.eta_inner <= 0:
            raise ValueError("learning rates and C must be positive")
        if self.outer_epochs < 1 or self.inner_epochs < 1:
            raise ValueError("epoch counts must be >= 1")

    def ranked_range(self, n: int) -> RankedRange:
        k = self.k if self.k > 0 else n
        return RankedRange(self.m, k).validate(n)


@dataclass(frozen=True)
class LambdaPair:
    lam: float
    lam_hat: float


@dataclass
class TrainReport:
    model: LinearModel
    objective_trace: list
    lambdas: list  # LambdaPair per logged epoch (may be empty)
    wall_ms: int
    seed: int


# ---------------------------------------------------------------------------
# loss specs: per-sample losses and (sub)gradients for the linear model

class BinaryMarginLoss:
    """Individual margin loss s(y * f(x)) for l = 1 models."""

    def __init__(self, kind: MarginLossKind):
        self.kind = kind
        self.name = kind.value

    def losses(self, W, b, data: Dataset) -> np.ndarray:
        margins = data.labels * (data.features @ W[0] + (b[0] if b is not None else 0.0))
        values, _ = margin_loss_vec(self.kind, margins)
        return values

    def grad_masked(self, W, b, data: Dataset, mask) -> tuple:
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return np.zeros_like(W), np.zeros(1)
        X = data.features[idx]
        y = data.labels[idx]
        margins = y * (X @ W[0] + (b[0] if b is not None else 0.0))
        _, derivs = margin_loss_vec(self.kind, margins)
        coeff = derivs * y
        gW = (coeff @ X)[None, :]
        return gW, np.array([coeff.sum()])

    def grad_single(self, W, b, data: Dataset, i: int) -> tuple:
        x = data.features[i]
        y = data.labels[i]
        margin = y * (x @ W[0] + (b[0] if b is not None else 0.0))
        values, derivs = margin_loss_vec(self.kind, np.array([margin]))
        coeff = derivs[0] * y
        return float(values[0]), (coeff * x)[None, :], np.array([coeff])


class SoftmaxLoss:
    """Softmax cross-entropy for multi-class models (labels 1..l)."""

    name = "softmax"

    def losses(self, W, b, data: Dataset) -> np.ndarray:
        scores = data.features @ W.T
        if b is not None:
            scores = scores + b
        shifted = scores - scores.max(axis=1, keepdims=True)
        logz = np.log(np.sum(np.exp(shifted), axis=1))
        true = shifted[np.arange(data.n), data.labels - 1]
        return logz - true

    def _probs(self, W, b, X):
        scores = X @ W.T
        if b is not None:
            scores = scores + b
        shifted = scores - scores.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        return e / e.sum(axis=1, keepdims=True)

    def grad_masked(self, W, b, data: Dataset, mask) -> tuple:
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return np.zeros_like(W), np.zeros(W.shape[0])
        X = data.features[idx]
        P = self._probs(W, b, X)
        P[np.arange(idx.size), data.labels[idx] - 1] -= 1.0
        return P.T @ X, P.sum(axis=0)

    def grad_single(self, W, b, data: Dataset, i: int) -> tuple:
        x = data.features[i]
        P = self._probs(W, b, x[None, :])[0]
        y = data.labels[i] - 1
        value = -np.log(max(P[y], 1e-300))
        P = P.copy()
        P[y] -= 1.0
        return float(value), np.outer(P, x), P


def _labelset_mask(data: Dataset) -> np.ndarray:
    mask = np.zeros((data.n, data.l), dtype=bool)
    for i, ys in enumerate(data.labels):
        for y in ys:
            mask[i, y - 1] = True
    return mask


class TKMLSampleLoss:
    """Per-sample top-k multi-label loss value and two-label subgradient."""

    def __init__(self, kprime: int):
        if kprime < 1:
            raise ValueError(f"kprime={kprime} must be >= 1")
        self.kprime = kprime
        self.name = f"tkml(k'={kprime})"
        self._mask_cache = {}

    def _mask_for(self, data: Dataset) -> np.ndarray:
        key = id(data)
        if key not in self._mask_cache:
            if len(self._mask_cache) > 8:
                self._mask_cache.clear()
            self._mask_cache[key] = _labelset_mask(data)
        return self._mask_cache[key]

    def _batch_eval(self, W, b, data: Dataset, idx=None):
        """(values, rank-(k'+1) label, argmin-true label), all 0-based.

        Ranking ties broken by lowest label index (stable sort on -hinges);
        the argmin over true labels likewise takes the lowest index.
        """
        X = data.features if idx is None else data.features[idx]
        scores = X @ W.T
        if b is not None:
            scores = scores + b
        mask = self._mask_for(data)
        if idx is not None:
            mask = mask[idx]
        masked = np.where(mask, scores, np.inf)
        y_star = np.argmin(masked, axis=1)  # first minimum = lowest index
        worst_true = masked[np.arange(masked.shape[0]), y_star]
        hinges = np.maximum(1.0 + scores - worst_true[:, None], 0.0)
        order = np.argsort(-hinges, axis=1, kind="stable")
        j_star = order[:, self.kprime]
        values = hinges[np.arange(hinges.shape[0]), j_star]
        return values, j_star, y_star

    def losses(self, W, b, data: Dataset) -> np.ndarray:
        values, _, _ = self._batch_eval(W, b, data)
        return values

    def _coeff_grad(self, data, idx, values, j_star, y_star, weight=None):
        """gW, gb from the +1/-1 label coefficients of each selected sample."""
        X = data.features if idx is None else data.features[idx]
        active = (values > 0.0) & (j_star != y_star)
        if weight is not None:
            active = active & weight
        A = np.zeros((X.shape[0], data.l))
        rows = np.flatnonzero(active)
        A[rows, j_star[rows]] = 1.0
        A[rows, y_star[rows]] = -1.0
        return A.T @ X, A.sum(axis=0)

    def grad_masked(self, W, b, data: Dataset, mask) -> tuple:
        values, j_star, y_star = self._batch_eval(W, b, data)
        return self._coeff_grad(data, None, values, j_star, y_star,
                                weight=np.asarray(mask, dtype=bool))

    def grad_single(self, W, b, data: Dataset, i: int) -> tuple:
        idx = np.array([i])
        values, j_star, y_star = self._batch_eval(W, b, data, idx)
        gW, gb = self._coeff_grad(data, idx, values, j_star, y_star)
        return float(values[0]), gW, gb


class TKMLDataLoss(TKMLSampleLoss):
    """Mean TKML loss over samples, exposed through its per-sample
    difference-of-convex split: top-(k'+1) label sum minus top-k' label sum.
    """

    def phi_grad(self, W, b, data: Dataset, count: int, idx=None) -> tuple:
        """Gradient of sum_i (top-`count` per-label hinge sum) over `idx`."""
        X = data.features if idx is None else data.features[idx]
        scores = X @ W.T
        if b is not None:
            scores = scores + b
        mask = self._mask_for(data)
        if idx is not None:
            mask = mask[idx]
        masked = np.where(mask, scores, np.inf)
        y_star = np.argmin(masked, axis=1)
        rows = np.arange(masked.shape[0])
        worst_true = masked[rows, y_star]
        hinges = np.maximum(1.0 + scores - worst_true[:, None], 0.0)
        order = np.argsort(-hinges, axis=1, kind="stable")
        A = np.zeros_like(hinges)
        for c in range(count):
            j = order[:, c]
            act = hinges[rows, j] > 0.0
            A[rows[act], j[act]] += 1.0
        np.subtract.at(A, (rows, y_star), A.sum(axis=1))
        return A.T @ X, A.sum(axis=0)


def make_loss_spec(loss_kind: str, kprime: int = 1):
    """Loss spec from its config-file name."""
    if loss_kind in ("logistic", "hinge"):
        return BinaryMarginLoss(MarginLossKind(loss_kind))
    if loss_kind == "softmax":
        return SoftmaxLoss()
    if loss_kind == "tkml":
        return TKMLSampleLoss(kprime)
    raise ValueError(f"unknown loss kind {loss_kind!r}")


# ---------------------------------------------------------------------------
# shared helpers

def _init_params(data: Dataset, use_bias: bool, init_scale: float = 0.0,
                 rng: np.random.Generator | None = None):
    l = max(data.l, 1)
    if init_scale > 0.0 and rng is not None:
        W = init_scale * rng.standard_normal((l, data.d))
        b = init_scale * rng.standard_normal(l) if use_bias else None
    else:
        W = np.zeros((l, data.d))
        b = np.zeros(l) if use_bias else None
    return W, b


def _as_model(W, b, loss_spec, config: TrainConfig) -> LinearModel:
    return LinearModel(
        weights=W.copy(),
        bias=None if b is None else b.copy(),
        meta={"loss_kind": getattr(loss_spec, "name", "none"),
              "k": config.k, "m": config.m, "kprime": config.kprime},
    )


def _check_finite(value, epoch):
    if not np.isfinite(value):
        raise TrainingDiverged(epoch)
    return value


def _reg_value(W, C):
    return float(np.sum(W ** 2)) / (2.0 * C)


def phi_subgradient(W, b, data: Dataset, loss_spec, threshold: float) -> tuple:
    """Subgradient of the top-ranked loss sum: sum of per-sample gradients
    over samples whose individual loss strictly exceeds the threshold."""
    losses = loss_spec.losses(W, b, data)
    return loss_spec.grad_masked(W, b, data, losses > threshold)


def sorr_objective(W, b, data: Dataset, loss_spec, r: RankedRange, C: float) -> float:
    """Exact regularized ranked-range sum at the current parameters."""
    losses = loss_spec.losses(W, b, data)
    srt = sort_descending(losses)
    return float(np.sum(srt[r.m:r.k])) + _reg_value(W, C)


# ---------------------------------------------------------------------------
# trainers

def _holdout_error(W, b, loss_spec, data: Dataset):
    """Classification error of the current parameters on a holdout set."""
    from .metrics import error_rate

    scores = data.features @ W.T
    if b is not None:
        scores = scores + b
    if data.l == 1:
        return error_rate(scores[:, 0], data.labels)
    if data.is_multilabel:
        # rank the worst true label: fraction of samples with positive loss
        return float(np.mean(loss_spec.losses(W, b, data) > 0.0))
    return error_rate(scores, data.labels)


def dca_train(data: Dataset, loss_spec, config: TrainConfig,
              validation_data: Dataset | None = None,
              eval_every: int = 100) -> TrainReport:
    """Difference-of-convex descent on the ranked-range sum of individual
    losses.

    Each outer round linearizes the subtracted top-m sum through its
    subgradient at the current parameters, then runs stochastic (or full
    batch) steps on the convex surrogate jointly with the top-k threshold
    variable.  m = 0 recovers average-top-k training.  A TKMLDataLoss spec
    switches to the per-sample label-level split instead.

    When ``validation_data`` is given, the holdout error is probed every
    ``eval_every`` stochastic steps and the best-scoring parameters are the
    ones returned (the final iterate is returned otherwise).
    """
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    r = config.ranked_range(data.n)
    W, b = _init_params(data, config.use_bias, config.init_scale, rng)
    trace, lambdas = [], []
    best = (np.inf, W, b)

    per_sample_dc = isinstance(loss_spec, TKMLDataLoss)
    for t in range(config.outer_epochs):
        if per_sample_dc:
            theta_hat_W, theta_hat_b = loss_spec.phi_grad(W, b, data, loss_spec.kprime)
        else:
            losses = loss_spec.losses(W, b, data)
            if r.m >= 1:
                # strict indicator against the (m+1)-th largest loss selects
                # exactly the top m samples when losses are distinct
                lam_hat = float(sort_descending(losses)[r.m])
                theta_hat_W, theta_hat_b = loss_spec.grad_masked(
                    W, b, data, losses > lam_hat)
            else:
                theta_hat_W, theta_hat_b = np.zeros_like(W), np.zeros(W.shape[0])

        lam = 0.0
        if config.batch == 0:
            for _ in range(config.inner_epochs):
                if per_sample_dc:
                    gW, gb = loss_spec.phi_grad(W, b, data, loss_spec.kprime + 1)
                    gW = (gW - theta_hat_W) / data.n
                    gb = (gb - theta_hat_b) / data.n
                    W = W - config.eta_inner * (gW + W / config.C)
                    if b is not None:
                        b = b - config.eta_inner * gb
                    continue
                else:
                    losses = loss_spec.losses(W, b, data)
                    mask = losses > lam
                    gW, gb = loss_spec.grad_masked(W, b, data, mask)
                    lam -= config.eta_inner * (r.k - int(mask.sum()))
                W = W - config.eta_inner * (gW - theta_hat_W + W / config.C)
                if b is not None:
                    b = b - config.eta_inner * (gb - theta_hat_b)
        else:
            batch = config.batch
            scale = batch / data.n
            for step in range(config.inner_epochs):
                idx = rng.integers(0, data.n, size=batch)
                gW = np.zeros_like(W)
                gb = np.zeros(W.shape[0])
                if per_sample_dc:
                    gW, gb = loss_spec.phi_grad(W, b, data,
                                                loss_spec.kprime + 1, idx=idx)
                else:
                    active = 0
                    for i in idx:
                        s_i, giW, gib = loss_spec.grad_single(W, b, data, i)
                        if s_i > lam:
                            gW += giW
                            gb += gib
                            active += 1
                    lam -= config.eta_inner * (r.k * scale - active)
                W = W - config.eta_inner * (
                    gW - scale * theta_hat_W + scale * W / config.C)
                if b is not None:
                    b = b - config.eta_inner * (gb - scale * theta_hat_b)
                if validation_data is not None and (step + 1) % eval_every == 0:
                    ve = _holdout_error(W, b, loss_spec, validation_data)
                    if ve < best[0]:
                        best = (ve, W.copy(), None if b is None else b.copy())

        obj = sorr_objective(W, b, data, loss_spec, r, config.C)
        trace.append(_check_finite(obj, t))
        lambdas.append(LambdaPair(lam=float(lam), lam_hat=float("nan")))

    if validation_data is not None and best[0] < np.inf:
        ve = _holdout_error(W, b, loss_spec, validation_data)
        if best[0] < ve:
            W, b = best[1], best[2]
    wall_ms = int((time.perf_counter() - start) * 1000)
    return TrainReport(_as_model(W, b, loss_spec, config), trace, lambdas,
                       wall_ms, config.seed)


def sgd_average_train(data: Dataset, loss_spec, config: TrainConfig) -> TrainReport:
    """(Mini-)batch gradient descent on the regularized average loss."""
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    W, b = _init_params(data, config.use_bias)
    trace = []
    for epoch in range(config.outer_epochs):
        if config.batch == 0:
            gW, gb = loss_spec.grad_masked(W, b, data, np.ones(data.n, dtype=bool))
            gW, gb = gW / data.n, gb / data.n
            W = W - config.eta_outer * (gW + W / config.C)
            if b is not None:
                b = b - config.eta_outer * gb
        else:
            steps = max(data.n // config.batch, 1)
            for _ in range(steps):
                idx = rng.integers(0, data.n, size=config.batch)
                gW = np.zeros_like(W)
                gb = np.zeros(W.shape[0])
                for i in idx:
                    _, giW, gib = loss_spec.grad_single(W, b, data, i)
                    gW += giW
                    gb += gib
                W = W - config.eta_outer * (gW / config.batch + W / config.C)
                if b is not None:
                    b = b - config.eta_outer * gb / config.batch
        obj = float(np.mean(loss_spec.losses(W, b, data))) + _reg_value(W, config.C)
        trace.append(_check_finite(obj, epoch))
    wall_ms = int((time.perf_counter() - start) * 1000)
    return TrainReport(_as_model(W, b, loss_spec, config), trace, [],
                       wall_ms, config.seed)


def lambda_pair_from_validation(validation_losses) -> LambdaPair:
    """Thresholds from clean validation losses: lam_hat = mean + std,
    lam = mean - 2*std (population std), ordering enforced."""
    arr = _as_values(validation_losses)
    mean = float(arr.mean())
    std = float(arr.std())  # population standard deviation
    lam_hat = mean + std
    lam = mean - 2.0 * std
    if lam_hat <= lam:
        lam = lam_hat - 1e-6
    return LambdaPair(lam=lam, lam_hat=lam_hat)


def estimate_noise_count(train_losses, lam_hat: float) -> int:
    """Number of training losses strictly above the learned threshold."""
    arr = _as_values(train_losses)
    return int(np.sum(arr > lam_hat))


def auto_train(train_data: Dataset, validation_data: Dataset, loss_spec,
               config: TrainConfig) -> TrainReport:
    """Ranked-range training without choosing (k, m): warm-up on the average
    loss, then learn the two thresholds from a clean validation set and run
    threshold-driven difference-of-convex rounds.
    """
    if validation_data.n < 1:
        raise ValueError("validation set must be non-empty")
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    W, b = _init_params(train_data, config.use_bias)
    trace, lambdas = [], []

    # phase 1: average-loss warm-up with validation-based early stop
    best_val = np.inf
    stall = 0
    for epoch in range(config.warmup_epochs):
        gW, gb = loss_spec.grad_masked(W, b, train_data,
                                       np.ones(train_data.n, dtype=bool))
        W = W - config.eta_outer * (gW / train_data.n + W / config.C)
        if b is not None:
            b = b - config.eta_outer * gb / train_data.n
        val_mean = float(np.mean(loss_spec.losses(W, b, validation_data)))
        _check_finite(val_mean, epoch)
        if val_mean < best_val - 1e-12:
            best_val = val_mean
            stall = 0
        else:
            stall += 1
            if stall >= config.patience:
                break

    pair = lambda_pair_from_validation(loss_spec.losses(W, b, validation_data))
    lam, lam_hat = pair.lam, pair.lam_hat

    # phase 2: threshold-driven rounds
    for t in range(config.outer_epochs):
        train_losses = loss_spec.losses(W, b, train_data)
        hW, hb = loss_spec.grad_masked(W, b, train_data, train_losses > lam_hat)
        theta_hat_W, theta_hat_b = hW / train_data.n, hb / train_data.n
        batch = config.batch if config.batch >= 1 else 1
        for step in range(config.inner_epochs):
            idx = rng.integers(0, train_data.n, size=batch)
            gW = np.zeros_like(W)
            gb = np.zeros(W.shape[0])
            for i in idx:
                s_i, giW, gib = loss_spec.grad_single(W, b, train_data, i)
                if s_i > lam:
                    gW += giW
                    gb += gib
            W = W - config.eta_inner * (
                gW / batch - theta_hat_W + W / (config.C * train_data.n))
            if b is not None:
                b = b - config.eta_inner * (gb / batch - theta_hat_b)
            if (step + 1) % config.refresh_every == 0:
                val_losses = loss_spec.losses(W, b, validation_data)
                lam = float(val_losses.mean() - 2.0 * val_losses.std())
        pair = lambda_pair_from_validation(loss_spec.losses(W, b, validation_data))
        lam, lam_hat = pair.lam, pair.lam_hat
        lambdas.append(pair)
        obj = float(np.mean(loss_spec.losses(W, b, validation_data)))
        trace.append(_check_finite(obj, t))

    wall_ms = int((time.perf_counter() - start) * 1000)
    return TrainReport(_as_model(W, b, loss_spec, config), trace, lambdas,
                       wall_ms, config.seed)


def tkml_aorr_train(data: Dataset, config: TrainConfig) -> TrainReport:
    """Simultaneous minimax updates on the combined objective: per-sample
    top-k multi-label losses aggregated through the ranked-range average,
    with joint ascent/descent steps on the two threshold variables."""
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    r = config.ranked_range(data.n)
    if not 1 <= config.kprime < data.l:
        raise ValueError(f"kprime={config.kprime} outside 1..{data.l - 1}")
    loss_spec = TKMLSampleLoss(config.kprime)
    W, b = _init_params(data, config.use_bias, config.init_scale, rng)
    lam = 0.0
    lam_hat = 0.0
    width = r.width
    trace, lambdas = [], []
    if config.warmup_epochs > 0:
        # average-loss warm start, then place the thresholds at the
        # analytic saddle of the warmed-up loss distribution
        for _ in range(config.warmup_epochs):
            gW, gb = loss_spec.grad_masked(W, b, data, np.ones(data.n, dtype=bool))
            W = W - config.eta_outer * (gW / data.n + W / config.C)
            if b is not None:
                b = b - config.eta_outer * gb / data.n
        srt = sort_descending(loss_spec.losses(W, b, data))
        lam = float(srt[r.k - 1])
        lam_hat = float((srt[r.m - 1] if r.m >= 1 else srt[0]) - lam)
    for t in range(config.outer_epochs):
        if config.batch >= 1 and config.batch < data.n:
            idx = rng.integers(0, data.n, size=config.batch)
            scale = data.n / config.batch
        else:
            idx = None
            scale = 1.0
        s, j_star, y_star = loss_spec._batch_eval(W, b, data, idx)
        keep = lam_hat > np.maximum(s - lam, 0.0)
        above = s > lam
        both = keep & above
        gW, gb = loss_spec._coeff_grad(data, idx, s, j_star, y_star, weight=both)
        W = W - config.eta_inner * (scale * gW / width + W / config.C)
        if b is not None:
            b = b - config.eta_inner * scale * gb / width
        lam = lam - config.eta_inner * (1.0 - scale * int(both.sum()) / width)
        lam_hat = lam_hat + config.eta_inner * (
            (data.n - r.m) / width - scale * int(keep.sum()) / width)
        lambdas.append(LambdaPair(lam=float(lam), lam_hat=float(lam_hat)))
        if (t + 1) % 10 == 0 or t == config.outer_epochs - 1:
            full = loss_spec.losses(W, b, data)
            obj = float(np.sum(sort_descending(full)[r.m:r.k])) / width
            _check_finite(obj, t)
            trace.append(obj)
        else:
            trace.append(float("nan"))
    wall_ms = int((time.perf_counter() - start) * 1000)
    return TrainReport(_as_model(W, b, loss_spec, config), trace, lambdas,
                       wall_ms, config.seed)


def multilabel_lr_train(data: Dataset, config: TrainConfig) -> TrainReport:
    """Independent per-label logistic regression (surrogate hamming loss) on
    sigmoid scores; the standard multi-label baseline."""
    if not data.is_multilabel:
        raise ValueError("multilabel_lr_train requires multi-label data")
    start = time.perf_counter()
    Y = np.zeros((data.n, data.l))
    for i, ys in enumerate(data.labels):
        for y in ys:
            Y[i, y - 1] = 1.0
    W = np.zeros((data.l, data.d))
    b = np.zeros(data.l) if config.use_bias else None
    trace = []
    X = data.features
    for epoch in range(config.outer_epochs):
        scores = X @ W.T
        if b is not None:
            scores = scores + b
        P = 1.0 / (1.0 + np.exp(-np.clip(scores, -500, 500)))
        G = (P - Y) / data.n
        W = W - config.eta_outer * (G.T @ X + W / config.C)
        if b is not None:
            b = b - config.eta_outer * G.sum(axis=0)
        bce = np.mean(np.logaddexp(0.0, scores) - Y * scores)
        trace.append(_check_finite(float(bce), epoch))
    wall_ms = int((time.perf_counter() - start) * 1000)
    model = LinearModel(weights=W, bias=b, meta={"loss_kind": "multilabel_lr"})
    return TrainReport(model, trace, [], wall_ms, config.seed)


_ADAPTIVE_STEPS = ((0.995, 32), (0.95, 16), (0.90, 8), (0.80, 4), (0.70, 2))


def adaptive_k(train_accuracy: float, n: int) -> int:
    """Shrink k as training accuracy rises: n, n/2, n/4, ..., n/32."""
    if not 0.0 <= train_accuracy <= 1.0:
        raise ValueError(f"accuracy {train_accuracy} outside [0, 1]")
    for threshold, divisor in _ADAPTIVE_STEPS:
        if train_accuracy >= threshold:
            return n // divisor
    return n
