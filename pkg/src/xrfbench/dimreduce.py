"""Feature standardization, PCA, and an exact all-pairs t-SNE embedding.

PCA works on the singular value decomposition of the centered matrix, with
component signs fixed so the largest-magnitude coordinate of each component
is positive. t-SNE finds per-point bandwidths by a safeguarded Newton search
on the conditional-distribution entropy (base-2 target log2(perplexity)),
then runs momentum gradient descent on the KL divergence with early
exaggeration. Everything is deterministic for a fixed seed; the quadratic
kernels are compiled single-threaded with numba.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit
from scipy.spatial.distance import cdist

from .errors import (
    InvalidConfig,
    InvalidFraction,
    PerplexityTooLarge,
    TooFewPoints,
    TooFewRows,
    TooManyPoints,
)

# exact t-SNE holds the full n x n affinity matrix; refuse unreasonable sizes
TSNE_MAX_POINTS = 10_000


@dataclass(frozen=True)
class StandardizedMatrix:
    data: np.ndarray          # (n, d), zero-variance columns forced to zero
    column_means: np.ndarray  # (d,)
    column_sds: np.ndarray    # (d,), sample sd; 0 recorded for constant columns


def standardize(m: np.ndarray) -> StandardizedMatrix:
    """Per-column z-scores with the sample (n-1) standard deviation."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("standardize expects a 2-D matrix")
    if m.shape[0] < 2:
        raise TooFewRows("standardize needs at least 2 rows")
    means = m.mean(axis=0)
    constant = np.ptp(m, axis=0) == 0
    sds = m.std(axis=0, ddof=1)
    sds[constant] = 0.0
    safe = np.where(constant, 1.0, sds)
    data = (m - means) / safe
    data[:, constant] = 0.0
    return StandardizedMatrix(data=data, column_means=means, column_sds=sds)


@dataclass(frozen=True)
class PcaModel:
    components: np.ndarray                # (d, k), orthonormal columns
    explained_variance_ratio: np.ndarray  # (k,), non-increasing
    retained_k: int


def pca_fit_transform(m: np.ndarray, variance_fraction: float) -> tuple[PcaModel, np.ndarray]:
    """Project onto the smallest component count reaching the variance target."""
    if not 0.0 < variance_fraction <= 1.0:
        raise InvalidFraction(f"variance_fraction must be in (0, 1], got {variance_fraction}")
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("pca_fit_transform expects a 2-D matrix")
    if m.shape[0] < 2:
        raise TooFewRows("PCA needs at least 2 rows")
    centered = m - m.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    variance = singular ** 2
    total = variance.sum()
    if total > 0:
        ratios = variance / total
    else:  # all-zero matrix: keep one arbitrary component
        ratios = np.zeros_like(variance)
        ratios[0] = 1.0
    cumulative = np.cumsum(ratios)
    cumulative /= cumulative[-1]
    k = int(np.searchsorted(cumulative, variance_fraction, side="left")) + 1
    components = vt[:k].T.copy()
    for c in range(k):
        pivot = int(np.argmax(np.abs(components[:, c])))
        if components[pivot, c] < 0:
            components[:, c] = -components[:, c]
    model = PcaModel(components=components,
                     explained_variance_ratio=ratios[:k].copy(),
                     retained_k=k)
    return model, centered @ components


@dataclass(frozen=True)
class TsneConfig:
    perplexity: float = 30.0
    iterations: int = 1000
    learning_rate: float = 200.0
    early_exaggeration: float = 12.0
    exaggeration_iters: int = 250
    seed: int = 0

    def __post_init__(self):
        if not self.perplexity > 0:
            raise InvalidConfig("perplexity must be positive", field="perplexity")
        if self.iterations < 1:
            raise InvalidConfig("iterations must be >= 1", field="iterations")
        if not self.learning_rate > 0:
            raise InvalidConfig("learning_rate must be positive", field="learning_rate")
        if self.early_exaggeration < 1:
            raise InvalidConfig("early_exaggeration must be >= 1", field="early_exaggeration")
        if self.exaggeration_iters < 0:
            raise InvalidConfig("exaggeration_iters must be >= 0", field="exaggeration_iters")


class TsneInfo(NamedTuple):
    kl_history: tuple[tuple[int, float], ...]  # (iteration, KL of the true joint P)
    entropy_bits: np.ndarray                   # achieved conditional entropies, per point
    betas: np.ndarray                          # Gaussian precisions from the search


@njit(cache=True)
def _beta_search(d2, target_nats, tol_nats, max_steps):
    n = d2.shape[0]
    cond = np.zeros((n, n))
    betas = np.empty(n)
    beta = 1.0  # warm-started across points
    for i in range(n):
        dmin = np.inf
        for j in range(n):
            if j != i and d2[i, j] < dmin:
                dmin = d2[i, j]
        lo = 0.0
        hi = np.inf
        for _ in range(max_steps):
            s = 0.0
            sd = 0.0
            sdd = 0.0
            for j in range(n):
                if j == i:
                    continue
                t = d2[i, j] - dmin
                e = np.exp(-beta * t)
                s += e
                sd += t * e
                sdd += t * t * e
            ed = sd / s
            diff = np.log(s) + beta * ed - target_nats
            if abs(diff) <= tol_nats:
                break
            if diff > 0.0:  # entropy too high: sharpen
                lo = beta
            else:
                hi = beta
            # Newton step on beta using dH/dbeta = -beta * Var[d]; bisect when
            # the step leaves the bracket
            var = sdd / s - ed * ed
            moved = False
            if var > 0.0:
                cand = beta + diff / (beta * var)
                if np.isfinite(cand) and cand > lo and (hi == np.inf or cand < hi):
                    beta = cand
                    moved = True
            if not moved:
                beta = beta * 2.0 if hi == np.inf else 0.5 * (lo + hi)
        s = 0.0
        for j in range(n):
            if j != i:
                cond[i, j] = np.exp(-beta * (d2[i, j] - dmin))
                s += cond[i, j]
        for j in range(n):
            cond[i, j] /= s
        betas[i] = beta
    return cond, betas


@njit(cache=True)
def _tsne_gradient(p, y, pmul, want_kl):
    n = y.shape[0]
    sum_w = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            dx = y[i, 0] - y[j, 0]
            dy = y[i, 1] - y[j, 1]
            sum_w += 1.0 / (1.0 + dx * dx + dy * dy)
    sum_w *= 2.0
    inv = 1.0 / sum_w
    grad = np.zeros((n, 2))
    kl = 0.0
    for i in range(n):
        gx = 0.0
        gy = 0.0
        for j in range(i + 1, n):
            dx = y[i, 0] - y[j, 0]
            dy = y[i, 1] - y[j, 1]
            w = 1.0 / (1.0 + dx * dx + dy * dy)
            q = w * inv
            c = (pmul * p[i, j] - q) * w
            gx += c * dx
            gy += c * dy
            grad[j, 0] -= c * dx
            grad[j, 1] -= c * dy
            if want_kl and p[i, j] > 0.0:
                kl += 2.0 * p[i, j] * np.log(p[i, j] / q)
        grad[i, 0] += gx
        grad[i, 1] += gy
    return grad * 4.0, kl


def conditional_probabilities(d2: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    """Row-stochastic Gaussian neighbor distributions matching the perplexity.

    Bandwidths are searched until each row entropy (base 2) is within 1e-5 of
    log2(perplexity). Returns (conditional matrix with zero diagonal, betas).
    """
    d2 = np.ascontiguousarray(d2, dtype=np.float64)
    target_nats = math.log(perplexity)
    tol_nats = 5e-6 * math.log(2.0)  # half the 1e-5-bit budget, in nats
    return _beta_search(d2, target_nats, tol_nats, 200)


def joint_probabilities(m: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized t-SNE affinities: non-negative, zero diagonal, sum 1."""
    d2 = cdist(m, m, "sqeuclidean")
    cond, _ = conditional_probabilities(d2, perplexity)
    joint = cond + cond.T
    joint /= joint.sum()
    return joint


def tsne_embed(
    m: np.ndarray,
    cfg: TsneConfig | None = None,
    info: bool = False,
    loss_every: int = 0,
) -> np.ndarray | tuple[np.ndarray, TsneInfo]:
    """Embed rows of ``m`` into the plane; deterministic for a fixed seed.

    With ``info=True`` also returns the KL trace (sampled every ``loss_every``
    iterations when > 0), achieved entropies, and bandwidth precisions.
    """
    cfg = cfg or TsneConfig()
    x = np.ascontiguousarray(m, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("tsne_embed expects a 2-D matrix")
    n = x.shape[0]
    if n < 4:
        raise TooFewPoints(f"t-SNE needs at least 4 points, got {n}")
    if n > TSNE_MAX_POINTS:
        raise TooManyPoints(f"exact t-SNE is capped at {TSNE_MAX_POINTS} points, got {n}")
    if cfg.perplexity >= n:
        raise PerplexityTooLarge(f"perplexity {cfg.perplexity} must be < n_points {n}")

    d2 = cdist(x, x, "sqeuclidean")
    cond, betas = conditional_probabilities(d2, cfg.perplexity)
    del d2
    p = cond + cond.T
    p /= p.sum()

    rng = np.random.default_rng(cfg.seed)
    y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    kl_history: list[tuple[int, float]] = []
    for it in range(cfg.iterations):
        exaggerated = it < cfg.exaggeration_iters
        pmul = cfg.early_exaggeration if exaggerated else 1.0
        momentum = 0.5 if exaggerated else 0.8
        want_kl = bool(loss_every) and (it % loss_every == 0 or it == cfg.iterations - 1)
        grad, kl = _tsne_gradient(p, y, pmul, want_kl)
        if want_kl:
            kl_history.append((it, float(kl)))
        flipped = update * grad < 0
        gains = np.where(flipped, gains + 0.2, gains * 0.8)
        np.clip(gains, 0.01, None, out=gains)
        update = momentum * update - cfg.learning_rate * (gains * grad)
        y = y + update
        y = y - y.mean(axis=0)

    if not info:
        return y
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.where(cond > 0, np.log2(np.where(cond > 0, cond, 1.0)), 0.0)
    entropy_bits = -(cond * logs).sum(axis=1)
    return y, TsneInfo(tuple(kl_history), entropy_bits, betas)
