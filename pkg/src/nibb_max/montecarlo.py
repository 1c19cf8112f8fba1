"""Samplers for the random-matrix models behind the restricted-maximum laws.

All samplers draw from per-draw counter-based streams: draw ``d`` of a run
with seed ``s`` uses ``Philox`` keyed by ``SeedSequence(s, spawn_key=(tag, d))``.
Results therefore do not depend on chunking or on how the work is split.

Bridge sampler and couplings
----------------------------
The ``N`` non-intersecting bridges are the eigenvalues of an ``N x N``
Hermitian Brownian bridge ``H(t)`` on ``[0, 1]``: diagonal entries are
standard bridges, off-diagonal real and imaginary parts are independent
bridges of variance ``t(1-t)/2``.  Each entry is built on the grid
``t_k = k h`` by the Markov recursion

    B_{k+1} = B_k (1 - t_{k+1}) / (1 - t_k) + sqrt(h (1 - t_{k+1}) / (1 - t_k)) Z_k,

where ``Z_k`` is the ``k``-th normal vector of the draw's stream.  Two
configurations with the same seed share ``Z``, so:

* with the default spacing ``h = p / steps`` runs at different ``p`` share
  their increments in rescaled time ``t / p`` (the coupling used for small-p
  sweeps);
* with a common explicit ``spacing`` the path for a smaller ``p`` is a prefix
  of the path for a larger one, so recorded maxima are nondecreasing in ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "SampleBatch",
    "MatrixBridgeConfig",
    "bridge_top_path",
    "bridge_eigenvalue_paths",
    "sample_nibb_restricted_max",
    "sample_antige_top",
    "sample_wishart_loe_top",
    "wishart_matrices",
    "sample_gue_top",
    "sample_dyson_stationary_top",
    "symmetric_top_eigenvalue",
    "symmetric_top_eigenpair",
    "hermitian_top_2x2",
    "hermitian_top_3x3",
]

_TAG_BRIDGE = 1
_TAG_BRIDGE_CORR = 2
_TAG_ANTIGE = 3
_TAG_WISHART = 4
_TAG_GUE = 5
_TAG_DYSON = 6

# elements per chunk of the bridge sampler (floats); keeps peak memory ~ 100 MB
_CHUNK_ELEMS = 4_000_000


@dataclass
class SampleBatch:
    """Draws of a scalar statistic together with the model that produced them."""

    values: np.ndarray
    model: dict
    seed: int
    n: int = field(default=-1)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if self.n == -1:
            self.n = len(self.values)
        if self.n != len(self.values):
            raise ValueError(f"n={self.n} but {len(self.values)} values")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite sample values")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def scaled(self, factor: float, power: float = 1.0, label: str | None = None) -> "SampleBatch":
        """``factor * values**power`` with the transform recorded in the model descriptor."""
        model = dict(self.model)
        model["transform"] = label or f"{factor!r}*x**{power!r}"
        return SampleBatch(factor * self.values**power, model, self.seed, self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleBatch):
            return NotImplemented
        return (
            self.model == other.model
            and self.seed == other.seed
            and self.n == other.n
            and np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class MatrixBridgeConfig:
    """Matrix-bridge run: ``N`` paths, maximum over ``[0, p]`` on a grid of ``steps`` intervals.

    ``spacing`` overrides the grid step; the grid is then ``k * spacing`` for
    ``k * spacing <= p``.
    """

    N: int
    p: float
    steps: int = 4096
    seed: int = 0
    spacing: float | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")
        if self.steps < 2:
            raise ValueError(f"steps must be >= 2, got {self.steps}")
        if self.spacing is not None and not 0.0 < self.spacing <= self.p / 2:
            raise ValueError(f"spacing must lie in (0, p/2], got {self.spacing}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def grid(self) -> np.ndarray:
        if self.spacing is None:
            return self.p * np.arange(self.steps + 1) / self.steps
        k = int(math.floor(self.p / self.spacing * (1 + 1e-12)))
        return self.spacing * np.arange(k + 1)

    def descriptor(self) -> dict:
        d = {"model": "nibb", "N": self.N, "p": self.p, "steps": self.steps}
        if self.spacing is not None:
            d["spacing"] = self.spacing
        return d


# --------------------------------------------------------------------------
# streams
# --------------------------------------------------------------------------


def _generator(seed: int, tag: int, draw: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(tag, int(draw)))))


def _normals(seed: int, tag: int, start: int, stop: int, shape: tuple[int, ...]) -> np.ndarray:
    return np.stack([_generator(seed, tag, d).standard_normal(shape) for d in range(start, stop)])


def _chunks(count: int, per_draw: int) -> Iterator[tuple[int, int]]:
    size = max(1, _CHUNK_ELEMS // max(per_draw, 1))
    for a in range(0, count, size):
        yield a, min(count, a + size)


def _check_count(count: int) -> None:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")


# --------------------------------------------------------------------------
# eigenvalues
# --------------------------------------------------------------------------


def hermitian_top_2x2(a: np.ndarray, d: np.ndarray, b_abs2: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of ``[[a, b], [conj(b), d]]`` given ``|b|^2``, elementwise."""
    half = 0.5 * (a - d)
    return 0.5 * (a + d) + np.sqrt(half * half + b_abs2)


def hermitian_top_3x3(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of Hermitian 3x3 matrices by the trigonometric formula.

    ``diag[..., i]`` holds ``A_ii`` and ``off[..., :]`` the complex entries
    ``A_01, A_02, A_12``.
    """
    a, b, c = diag[..., 0], diag[..., 1], diag[..., 2]
    x01, x02, x12 = off[..., 0], off[..., 1], off[..., 2]
    q = (a + b + c) / 3.0
    a, b, c = a - q, b - q, c - q
    n01, n02, n12 = np.abs(x01) ** 2, np.abs(x02) ** 2, np.abs(x12) ** 2
    p2 = a * a + b * b + c * c + 2.0 * (n01 + n02 + n12)
    pp = np.sqrt(p2 / 6.0)
    det = a * b * c + 2.0 * np.real(x01 * x12 * np.conj(x02)) - a * n12 - b * n02 - c * n01
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(pp > 0, det / (2.0 * pp**3), 0.0)
    phi = np.arccos(np.clip(r, -1.0, 1.0)) / 3.0
    return q + 2.0 * pp * np.cos(phi)


def _hermitian_from_bridges(x: np.ndarray, N: int) -> np.ndarray:
    """Assemble Hermitian matrices from ``N^2`` real components on the last axis."""
    h = np.zeros(x.shape[:-1] + (N, N), dtype=complex)
    iu = np.triu_indices(N, 1)
    m = len(iu[0])
    for i in range(N):
        h[..., i, i] = x[..., i]
    off = (x[..., N : N + m] + 1j * x[..., N + m : N + 2 * m]) / math.sqrt(2.0)
    h[..., iu[0], iu[1]] = off
    h[..., iu[1], iu[0]] = np.conj(off)
    return h


def _top_from_components(x: np.ndarray, N: int) -> np.ndarray:
    """Top eigenvalue of the Hermitian matrix encoded by ``N^2`` real components."""
    if N == 1:
        return x[..., 0]
    s2 = math.sqrt(2.0)
    if N == 2:
        b2 = 0.5 * (x[..., 2] ** 2 + x[..., 3] ** 2)
        return hermitian_top_2x2(x[..., 0], x[..., 1], b2)
    if N == 3:
        off = (x[..., 3:6] + 1j * x[..., 6:9]) / s2
        return hermitian_top_3x3(x[..., 0:3], off)
    return np.linalg.eigvalsh(_hermitian_from_bridges(x, N))[..., -1]


def symmetric_top_eigenpair(matrix) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector of a real symmetric or Hermitian matrix."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if a.size and np.max(np.abs(a - a.conj().T)) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric/Hermitian to 1e-12")
    w, v = np.linalg.eigh(a)
    return float(w[-1]), v[:, -1]


def symmetric_top_eigenvalue(matrix) -> float:
    return symmetric_top_eigenpair(matrix)[0]


# --------------------------------------------------------------------------
# matrix bridge
# --------------------------------------------------------------------------


def _bridge_components(t: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Standard Brownian bridges on the grid ``t`` (``t[0] = 0``) from normals ``z[..., k, :]``."""
    h = np.diff(t)
    one_minus = 1.0 - t
    with np.errstate(divide="ignore", invalid="ignore"):
        coef = np.where(one_minus[1:] > 0, np.sqrt(h / (one_minus[:-1] * one_minus[1:])), 0.0)
    w = np.cumsum(z * coef[:, None], axis=-2)
    out = np.zeros(z.shape[:-2] + (len(t), z.shape[-1]))
    out[..., 1:, :] = w * one_minus[1:, None]
    return out


def bridge_top_path(cfg: MatrixBridgeConfig, draw: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Grid and top-eigenvalue path of one draw."""
    t = cfg.grid()
    z = _normals(cfg.seed, _TAG_BRIDGE, draw, draw + 1, (len(t) - 1, cfg.N**2))
    return t, _top_from_components(_bridge_components(t, z), cfg.N)[0]


def bridge_eigenvalue_paths(cfg: MatrixBridgeConfig, draw: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Grid and all ``N`` eigenvalue paths (ascending along the last axis) of one draw."""
    t = cfg.grid()
    z = _normals(cfg.seed, _TAG_BRIDGE, draw, draw + 1, (len(t) - 1, cfg.N**2))
    x = _bridge_components(t, z)[0]
    return t, np.linalg.eigvalsh(_hermitian_from_bridges(x, cfg.N))


def sample_nibb_restricted_max(cfg: MatrixBridgeConfig, count: int, correction: bool = False) -> SampleBatch:
    """Draws of ``M_N(p)``: maximum over the grid of the top eigenvalue of the matrix bridge.

    With ``correction`` each grid interval contributes an independent draw of
    the maximum of a unit-diffusion Brownian bridge between its endpoint
    values, which removes most of the downward grid bias; the top eigenvalue
    has unit local diffusion, but the eigenvalue drift is ignored within an
    interval.
    """
    _check_count(count)
    t = cfg.grid()
    k = len(t) - 1
    n2 = cfg.N**2
    out = np.empty(count)
    for a, b in _chunks(count, k * n2 * 3):
        z = _normals(cfg.seed, _TAG_BRIDGE, a, b, (k, n2))
        top = _top_from_components(_bridge_components(t, z), cfg.N)
        if correction:
            u = np.stack([_generator(cfg.seed, _TAG_BRIDGE_CORR, d).random(k) for d in range(a, b)])
            h = np.diff(t)
            lo, hi = top[:, :-1], top[:, 1:]
            inter = 0.5 * (lo + hi + np.sqrt((hi - lo) ** 2 - 2.0 * h * np.log1p(-u)))
            out[a:b] = np.maximum(top.max(axis=1), inter.max(axis=1))
        else:
            out[a:b] = top.max(axis=1)
    model = cfg.descriptor()
    if correction:
        model["correction"] = "bridge-max"
    return SampleBatch(out, model, cfg.seed, count)


# --------------------------------------------------------------------------
# ensembles
# --------------------------------------------------------------------------


def sample_antige_top(n: int, count: int, seed: int = 0) -> SampleBatch:
    """Largest eigenvalue of ``(i/2)(X - X^T)``, i.e. largest singular value of ``(X - X^T)/2``."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    _check_count(count)
    out = np.empty(count)
    for a, b in _chunks(count, n * n * 4):
        x = _normals(seed, _TAG_ANTIGE, a, b, (n, n))
        anti = 0.5 * (x - np.swapaxes(x, -1, -2))
        if n == 2:
            out[a:b] = np.abs(anti[:, 0, 1])
        elif n == 3:
            out[a:b] = np.sqrt(anti[:, 0, 1] ** 2 + anti[:, 0, 2] ** 2 + anti[:, 1, 2] ** 2)
        else:
            out[a:b] = np.linalg.svd(anti, compute_uv=False)[:, 0]
    return SampleBatch(out, {"model": "antige", "n": n}, seed, count)


def wishart_matrices(N: int, m: int, count: int, seed: int = 0, start: int = 0) -> np.ndarray:
    """``X X^T`` for draws ``start .. start+count-1`` with ``X`` of size ``N x m``."""
    x = _normals(seed, _TAG_WISHART, start, start + count, (N, m))
    return x @ np.swapaxes(x, -1, -2)


def sample_wishart_loe_top(N: int, m: int, count: int, seed: int = 0) -> SampleBatch:
    """Largest eigenvalue of ``X X^T`` with ``X`` an ``N x m`` standard real Gaussian matrix."""
    if not m >= N >= 1:
        raise ValueError(f"need m >= N >= 1, got N={N}, m={m}")
    _check_count(count)
    out = np.empty(count)
    for a, b in _chunks(count, N * (N + m) * 4):
        w = wishart_matrices(N, m, b - a, seed, a)
        out[a:b] = w[:, 0, 0] if N == 1 else np.linalg.eigvalsh(w)[:, -1]
    return SampleBatch(out, {"model": "wishart", "N": N, "m": m}, seed, count)


def _stationary_components(z: np.ndarray, N: int) -> np.ndarray:
    """Stationary matrix OU components: diagonal variance 1/2, off-diagonal parts 1/2 before the 1/sqrt(2) fold."""
    return z / math.sqrt(2.0)


def sample_gue_top(N: int, count: int, seed: int = 0) -> SampleBatch:
    """Top eigenvalue of the stationary law of the matrix OU process (GUE, diagonal variance 1/2)."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    _check_count(count)
    out = np.empty(count)
    for a, b in _chunks(count, N * N * 4):
        x = _stationary_components(_normals(seed, _TAG_GUE, a, b, (N * N,)), N)
        out[a:b] = _top_from_components(x, N)
    return SampleBatch(out, {"model": "gue", "N": N}, seed, count)


def sample_dyson_stationary_top(N: int, times: Sequence[float], count: int, seed: int = 0) -> SampleBatch:
    """``sup_t lambda_N(t) / cosh(t)`` over ``times`` for the stationary matrix OU process.

    The process ``dX = -X dt + sigma dB`` (``sigma = 1`` on the diagonal,
    ``1/sqrt(2)`` for each off-diagonal real/imaginary part) starts in its
    stationary law at ``times[0]`` and is advanced with the exact transition.
    """
    times = np.asarray(times, dtype=float)
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a nonempty 1-d sequence")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    _check_count(count)
    decay = np.exp(-np.diff(times))
    noise = np.sqrt((1.0 - decay**2) / 2.0)
    cosh = np.cosh(times)
    out = np.empty(count)
    n2 = N * N
    for a, b in _chunks(count, len(times) * n2 * 3):
        z = _normals(seed, _TAG_DYSON, a, b, (len(times), n2))
        x = np.empty_like(z)
        x[:, 0] = z[:, 0] / math.sqrt(2.0)
        for i in range(1, len(times)):
            x[:, i] = decay[i - 1] * x[:, i - 1] + noise[i - 1] * z[:, i]
        top = _top_from_components(x, N)
        out[a:b] = (top / cosh).max(axis=1)
    model = {"model": "dyson", "N": N, "times": [float(t) for t in times]}
    if len(times) > 8:
        model["times"] = {"start": float(times[0]), "stop": float(times[-1]), "points": int(len(times))}
    return SampleBatch(out, model, seed, count)
