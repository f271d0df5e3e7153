"""Signal generation by geodesic perturbation of SVD factors.

The pipeline: reshape a signal into a page matrix, factor it as
U1 S V1*, move U1 and V1 independently along random geodesics of their
orthogonal groups (scaled against the injectivity radius by beta_u and
beta_v), reconstruct U2 S V2* and reshape back. The singular values are
never touched, so the energy assigned to each dyad of the expansion is
invariant; only the basis representation moves.

Both factors are perturbed on their full orthogonal groups by default;
rank-d mode retracts only the leading d columns and keeps the residual
dyads untouched (in that mode the reconstruction's singular values are
no longer exactly the stored ones, since the perturbed leading dyads
lose orthogonality against the untouched tail).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fda import FunctionalEnsemble
from .signal import PageMatrix, TimeSeries, from_page_matrix, smooth, to_page_matrix
from .stiefel import (
    MetricParams,
    StiefelPoint,
    exp_map,
    geodesic,
    normalize_and_scale,
    random_tangent,
)

__all__ = [
    "AugmentConfig",
    "AugmentResult",
    "stiefelgen_matrix",
    "stiefelgen_series",
    "geodesic_path",
    "batch_generate",
    "ambient_perturb",
]


def _worker_cap() -> int:
    """Parallelism cap from the STIEFELGEN_THREADS environment variable."""
    raw = os.environ.get("STIEFELGEN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class AugmentConfig:
    """Knobs of one generation run.

    beta_u and beta_v scale the column-space and row-space perturbations
    independently (a single beta is just beta_u == beta_v). rank, when
    set, restricts the perturbation to the leading d columns of each
    factor.
    """

    beta_u: float = 0.0
    beta_v: float = 0.0
    alpha: float = 0.0
    smooth_len: int = 1
    rank: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("beta_u", "beta_v"):
            b = getattr(self, name)
            if not 0.0 <= b <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {b}")
        if self.smooth_len < 1:
            raise ValueError("smooth_len must be >= 1")
        if self.rank is not None and self.rank < 1:
            raise ValueError("rank must be a positive integer")
        MetricParams(self.alpha)  # reject alpha = -1 up front

    @property
    def metric(self) -> MetricParams:
        return MetricParams(self.alpha)


@dataclass(frozen=True)
class AugmentResult:
    """A generated matrix plus the factorization it came from.

    factors holds (U1, sigma, V1) of the input; tangents the sampled
    (scaled) directions. In full-rank mode the singular values of
    `generated` equal sigma to within 1e-8.
    """

    generated: np.ndarray
    factors: tuple
    tangents: tuple


def _perturb_factor(
    point: StiefelPoint,
    beta: float,
    metric: MetricParams,
    rng: np.random.Generator,
) -> tuple:
    """Sample, scale and retract one factor. Returns (endpoint, tangent)."""
    raw = random_tangent(point, rng)
    scaled = normalize_and_scale(point, raw, beta, metric)
    return exp_map(point, scaled, metric), scaled


def stiefelgen_matrix(
    mat: np.ndarray,
    cfg: AugmentConfig,
    rng: np.random.Generator,
) -> AugmentResult:
    """Perturb a matrix by moving its SVD factors along random geodesics.

    Tangents are always sampled for U first and V second, regardless of
    the beta values, so runs with the same seed share directions across
    different beta settings.

    Raises:
        ValueError: for inputs smaller than 2 x 2 or rank >= min(m, n).
        numpy.linalg.LinAlgError: if the SVD fails to converge.
    """
    mat = np.asarray(mat)
    if mat.ndim != 2 or min(mat.shape) < 2:
        raise ValueError(f"need a matrix with min(m, n) >= 2, got shape {mat.shape}")
    m, n = mat.shape
    if cfg.rank is not None and cfg.rank >= min(m, n):
        raise ValueError(f"rank must be < min(m, n) = {min(m, n)}, got {cfg.rank}")

    u1, sigma, v1h = np.linalg.svd(mat, full_matrices=True)
    v1 = v1h.conj().T
    metric = cfg.metric

    if cfg.rank is None:
        u_pt, v_pt = StiefelPoint(u1), StiefelPoint(v1)
        u2, du = _perturb_factor(u_pt, cfg.beta_u, metric, rng)
        v2, dv = _perturb_factor(v_pt, cfg.beta_v, metric, rng)
        k = sigma.shape[0]
        generated = (u2.matrix[:, :k] * sigma) @ v2.matrix[:, :k].conj().T
    else:
        d = cfg.rank
        k = sigma.shape[0]
        u_pt, v_pt = StiefelPoint(u1[:, :d]), StiefelPoint(v1[:, :d])
        u2, du = _perturb_factor(u_pt, cfg.beta_u, metric, rng)
        v2, dv = _perturb_factor(v_pt, cfg.beta_v, metric, rng)
        generated = (u2.matrix * sigma[:d]) @ v2.matrix.conj().T
        generated = generated + (u1[:, d:k] * sigma[d:]) @ v1h[d:k, :]

    return AugmentResult(generated=generated, factors=(u1, sigma, v1), tangents=(du, dv))


def stiefelgen_series(
    series: TimeSeries,
    m: int,
    cfg: AugmentConfig,
    rng: np.random.Generator,
    strategy: str = "pad_edge",
) -> TimeSeries:
    """End-to-end generation for a univariate signal.

    Page-matrix reshape, factor perturbation, inverse reshape, then a
    moving average of width cfg.smooth_len. The output length equals the
    input length whenever the fitted page covers the signal (always true
    when m divides the length); the rounding rule may otherwise drop a
    short tail.
    """
    pm = to_page_matrix(series, m, strategy)
    result = stiefelgen_matrix(pm.data, cfg, rng)
    out = from_page_matrix(PageMatrix(result.generated, pm.original_length, pm.fit_strategy))
    out = TimeSeries(out.values, series.sample_interval)
    return smooth(out, cfg.smooth_len)


def geodesic_path(
    mat: np.ndarray,
    cfg: AugmentConfig,
    steps: int,
    rng: np.random.Generator,
) -> list:
    """Reconstructions along one shared geodesic, at t = 0, 1/steps, ..., 1.

    A single (tangent_u, tangent_v) pair is sampled, so the path
    interpolates one realization: element 0 is the input itself and
    element `steps` is bitwise the one-shot stiefelgen_matrix output for
    the same generator state.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    mat = np.asarray(mat)
    if mat.ndim != 2 or min(mat.shape) < 2:
        raise ValueError(f"need a matrix with min(m, n) >= 2, got shape {mat.shape}")
    if cfg.rank is not None:
        raise ValueError("geodesic paths support full-rank mode only")

    u1, sigma, v1h = np.linalg.svd(mat, full_matrices=True)
    v1 = v1h.conj().T
    metric = cfg.metric
    u_pt, v_pt = StiefelPoint(u1), StiefelPoint(v1)
    du = normalize_and_scale(u_pt, random_tangent(u_pt, rng), cfg.beta_u, metric)
    dv = normalize_and_scale(v_pt, random_tangent(v_pt, rng), cfg.beta_v, metric)

    k = sigma.shape[0]
    path = [mat.copy()]
    for step in range(1, steps + 1):
        t = step / steps
        u_t = geodesic(u_pt, du, t, metric).matrix
        v_t = geodesic(v_pt, dv, t, metric).matrix
        path.append((u_t[:, :k] * sigma) @ v_t[:, :k].conj().T)
    return path


def batch_generate(
    series: TimeSeries,
    count: int,
    m: int,
    cfg: AugmentConfig,
    strategy: str = "pad_edge",
) -> FunctionalEnsemble:
    """Ensemble of independent draws, one row per generated signal.

    Per-draw RNG streams are spawned from cfg.seed, so the ensemble is
    reproducible and draws may run concurrently (capped by the
    STIEFELGEN_THREADS environment variable) without changing the
    output or its ordering.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    streams = np.random.SeedSequence(cfg.seed).spawn(count)

    def draw(seq) -> np.ndarray:
        return stiefelgen_series(series, m, cfg, np.random.default_rng(seq), strategy).values

    workers = min(_worker_cap(), count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(draw, streams))
    else:
        rows = [draw(seq) for seq in streams]
    return FunctionalEnsemble(np.vstack(rows))


def ambient_perturb(
    mat: np.ndarray,
    sigma: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Baseline comparator: jitter the SVD factors off the manifold.

    Adds i.i.d. N(0, sigma^2) noise to U1 and V1 with no retraction and
    reconstructs. The perturbed factors are generally not orthonormal
    and the output's singular values are not preserved; provided for
    comparison studies only.
    """
    if not np.isfinite(sigma) or sigma < 0:
        raise ValueError(f"sigma must be finite and >= 0, got {sigma}")
    mat = np.asarray(mat)
    u1, s, v1h = np.linalg.svd(mat, full_matrices=True)
    v1 = v1h.conj().T
    u_noisy = u1 + sigma * rng.standard_normal(u1.shape)
    v_noisy = v1 + sigma * rng.standard_normal(v1.shape)
    k = s.shape[0]
    return (u_noisy[:, :k] * s) @ v_noisy[:, :k].conj().T
