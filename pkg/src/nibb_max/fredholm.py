"""Distribution functions from finite-rank Fredholm determinants.

Conventions for the restricted maximum ``M_N(p)`` of the top path of ``N``
non-intersecting Brownian bridges:

* :func:`restricted_max_cdf` returns ``P(M_N(p) <= r)`` directly, i.e. the
  factor ``sqrt(2)`` in the determinant formula is applied internally.
* :func:`limit_cdf_hermite` and :func:`limit_cdf_laguerre` return
  ``P(Mhat <= x)`` where ``Mhat`` is the limit in law of ``M_N(p)/sqrt(p)``.
  The Hermite route evaluates ``U_N(x/sqrt(2))``, the Laguerre route
  ``F_LUE(x^2/2)``; for ``N = 1`` both equal ``erf(x/sqrt(2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

import numpy as np

from .kernels import (
    DEFAULT_POINTS,
    KernelMatrix,
    f_matrix,
    laguerre_kernel_matrix,
    m_matrix_general_p,
    m_matrix_limit,
    parity_split,
    q_matrix_closed,
)

__all__ = [
    "CdfCurve",
    "CDF_EPS",
    "det_id_minus",
    "restricted_max_cdf",
    "limit_cdf_hermite",
    "limit_cdf_matrix",
    "limit_cdf_laguerre",
    "lue_cdf",
    "limit_lue_parameters",
    "cdf_curve",
    "restricted_max_curve",
    "limit_curve",
    "lue_curve",
    "default_grid",
    "TAIL_TARGET",
    "ks_distance",
    "ks_two_sample",
    "ks_critical_value",
]

CDF_EPS = 1e-9
MONOTONE_SLACK = 1e-8


@dataclass
class CdfCurve:
    """A CDF sampled on an increasing grid, with a descriptor of where it came from."""

    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape or self.grid.ndim != 1:
            raise ValueError("grid and values must be 1-d arrays of equal length")

    def violations(self) -> list[str]:
        out = []
        if len(self.grid) > 1 and not np.all(np.diff(self.grid) > 0):
            out.append("grid not strictly increasing")
        if len(self.values):
            if self.values.min() < -CDF_EPS:
                out.append(f"value below 0: {self.values.min():.3e}")
            if self.values.max() > 1 + CDF_EPS:
                out.append(f"value above 1: {self.values.max():.17g}")
        if len(self.values) > 1 and np.diff(self.values).min() < -MONOTONE_SLACK:
            out.append(f"decreasing by {-np.diff(self.values).min():.3e}")
        return out

    def check(self) -> "CdfCurve":
        bad = self.violations()
        if bad:
            raise ValueError(f"invalid CDF curve {self.meta}: " + "; ".join(bad))
        return self

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CdfCurve):
            return NotImplemented
        return (
            np.array_equal(self.grid, other.grid)
            and np.array_equal(self.values, other.values)
            and self.meta == other.meta
        )


def det_id_minus(m: Union[KernelMatrix, np.ndarray]) -> float:
    """``det(I - M)`` by LU factorization with partial pivoting."""
    entries = m.entries if isinstance(m, KernelMatrix) else np.asarray(m, dtype=float)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"det(I - M) needs a square matrix, got shape {entries.shape}")
    if isinstance(m, KernelMatrix) and not m.is_square():
        raise ValueError(f"{m.label} has different row and column index ranges")
    return float(np.linalg.det(np.eye(entries.shape[0]) - entries))


def _check_p(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")


def restricted_max_cdf(N: int, p: float, r: float, points: int = DEFAULT_POINTS) -> float:
    """``P(M_N(p) <= r)`` for ``0 < p < 1``."""
    _check_p(p)
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    alpha = 0.5 * math.log(p / (1.0 - p))
    return det_id_minus(m_matrix_general_p(N, math.sqrt(2.0) * r, alpha, points))


def limit_cdf_hermite(N: int, x: float) -> float:
    """``P(Mhat_N(0) <= x) = det(I - Q F)`` at ``r = x / sqrt(2)``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    r = x / math.sqrt(2.0)
    return det_id_minus(q_matrix_closed(N, r) @ f_matrix(N, r))


def limit_cdf_matrix(N: int, x: float, points: int = DEFAULT_POINTS) -> float:
    """Same quantity as :func:`limit_cdf_hermite`, from the quadrature matrix of the limiting kernel."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    return det_id_minus(m_matrix_limit(N, x / math.sqrt(2.0), points))


def lue_cdf(m: int, a: float, x: float, points: int = DEFAULT_POINTS) -> float:
    """Distribution of the largest charge of the size-``m`` generalized LUE with weight ``x^a e^{-x}``."""
    return det_id_minus(laguerre_kernel_matrix(m, a, x, points))


def limit_lue_parameters(N: int) -> tuple[int, float]:
    """``(floor((N+1)/2), (-1)^N / 2)``: size and exponent of the limiting LUE."""
    return parity_split(N).half, 0.5 * (-1) ** N


def limit_cdf_laguerre(N: int, x: float, points: int = DEFAULT_POINTS) -> float:
    """``P(Mhat_N(0) <= x)`` as ``F_LUE(x^2 / 2)``."""
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    m, a = limit_lue_parameters(N)
    return lue_cdf(m, a, 0.5 * x * x, points)


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------


def cdf_curve(func: Callable[[float], float], grid: Iterable[float], meta: dict) -> CdfCurve:
    grid = np.asarray(list(grid), dtype=float)
    values = np.array([func(float(x)) for x in grid])
    return CdfCurve(grid, values, dict(meta)).check()


def restricted_max_curve(N: int, p: float, grid: Iterable[float]) -> CdfCurve:
    _check_p(p)
    meta = {"model": "restricted_max", "N": N, "p": p, "method": "hermite-quadrature"}
    return cdf_curve(lambda r: restricted_max_cdf(N, p, r), grid, meta)


def limit_curve(N: int, grid: Iterable[float], method: str = "hermite") -> CdfCurve:
    funcs = {"hermite": limit_cdf_hermite, "laguerre": limit_cdf_laguerre, "matrix": limit_cdf_matrix}
    if method not in funcs:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(funcs)}")
    meta = {"model": "limit", "N": N, "method": method}
    f = funcs[method]
    return cdf_curve(lambda x: f(N, x), grid, meta)


def lue_curve(m: int, a: float, grid: Iterable[float]) -> CdfCurve:
    if a <= -1:
        raise ValueError(f"need a > -1, got {a}")
    meta = {"model": "lue", "m": m, "a": a, "method": "laguerre-quadrature"}
    return cdf_curve(lambda x: lue_cdf(m, a, x), grid, meta)


TAIL_TARGET = 1e-7


def default_grid(model: str, *, N: int = 1, p: float = 0.5, m: int = 1, a: float = 0.0, points: int = 201) -> np.ndarray:
    """Grid from 0 to the first half-integer end point where the CDF exceeds ``1 - TAIL_TARGET``."""
    if model == "restricted-max":
        f = lambda r: restricted_max_cdf(N, p, r)  # noqa: E731
    elif model == "limit":
        f = lambda x: limit_cdf_laguerre(N, x)  # noqa: E731
    elif model == "lue":
        f = lambda x: lue_cdf(m, a, x)  # noqa: E731
    else:
        raise ValueError(f"unknown model {model!r}")
    end = 0.5
    while f(end) < 1.0 - TAIL_TARGET:
        end += 0.5
        if end > 1e3:
            raise RuntimeError(f"CDF of {model} never reaches 1 - {TAIL_TARGET}")
    return np.linspace(0.0, end, points)


# --------------------------------------------------------------------------
# goodness of fit
# --------------------------------------------------------------------------


def _sample_values(sample) -> np.ndarray:
    return np.asarray(getattr(sample, "values", sample), dtype=float)


def ks_distance(empirical, theory: Union[CdfCurve, Callable]) -> float:
    """Kolmogorov-Smirnov distance between a sample and a reference CDF.

    ``theory`` may be a :class:`CdfCurve` (linearly interpolated) or a
    callable, scalar or vectorized.
    """
    x = np.sort(_sample_values(empirical))
    n = len(x)
    if n == 0:
        raise ValueError("empty sample")
    if isinstance(theory, CdfCurve):
        f = theory(x)
    else:
        try:
            f = np.asarray(theory(x), dtype=float)
            if f.shape != x.shape:
                raise TypeError
        except (TypeError, ValueError):
            f = np.array([theory(float(v)) for v in x])
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def ks_two_sample(a, b) -> float:
    """Two-sample KS statistic ``sup |F_a - F_b|``."""
    a = np.sort(_sample_values(a))
    b = np.sort(_sample_values(b))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("empty sample")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / len(a)
    fb = np.searchsorted(b, pts, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(n: int, level: float = 0.01, m: int | None = None) -> float:
    """Asymptotic KS critical value ``c(level) * sqrt(1/n + 1/m)`` (one-sample when ``m`` is None)."""
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    scale = 1.0 / n if m is None else 1.0 / n + 1.0 / m
    return c * math.sqrt(scale)
