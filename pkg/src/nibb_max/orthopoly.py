"""Hermite and generalized Laguerre polynomials/functions, erfc and quadrature.

Floating-point evaluation goes through three-term recurrences on the
*normalized* functions, so that neither the normalization constant nor the
raw polynomial is formed separately (they under/overflow in opposite
directions once the degree reaches a few hundred).  The exact path works on
:class:`PolyRat`, a dense polynomial with :class:`fractions.Fraction`
coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special

__all__ = [
    "PolyRat",
    "HermiteEval",
    "QuadratureRule",
    "hermite_poly",
    "hermite_poly_exact",
    "hermite_imag_reduced",
    "hermite_function",
    "hermite_function_scaled",
    "hermite_functions",
    "normalized_hermite_polys",
    "laguerre_poly",
    "laguerre_poly_exact",
    "laguerre_function",
    "laguerre_functions",
    "gamma_half_integer",
    "erfc",
    "gauss_legendre_rule",
    "semi_infinite_rule",
    "real_line_rule",
    "tail_for_degree",
]

_PI_M14 = math.pi ** -0.25
_RESCALE_AT = 1e150


# --------------------------------------------------------------------------
# exact polynomials
# --------------------------------------------------------------------------


def _strip(coeffs: Sequence) -> tuple[Fraction, ...]:
    c = [Fraction(v) for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True, init=False)
class PolyRat:
    """Dense univariate polynomial with exact rational coefficients.

    ``coeffs[i]`` is the coefficient of ``x**i``; the zero polynomial is the
    empty tuple.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Sequence = ()):
        object.__setattr__(self, "coeffs", _strip(coeffs))

    @classmethod
    def monomial(cls, power: int, coeff=1) -> "PolyRat":
        return cls([0] * power + [coeff])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self) -> str:
        return f"PolyRat({[str(c) for c in self.coeffs]})"

    def __eq__(self, other) -> bool:
        if isinstance(other, PolyRat):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == _strip([other])
        if isinstance(other, (list, tuple)):
            return self.coeffs == _strip(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def _coerce(self, other) -> "PolyRat":
        if isinstance(other, PolyRat):
            return other
        if isinstance(other, (int, Fraction)):
            return PolyRat([other])
        raise TypeError(f"cannot combine PolyRat with {type(other).__name__}")

    def __add__(self, other) -> "PolyRat":
        o = self._coerce(other)
        n = max(len(self), len(o))
        return PolyRat([self[i] + o[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "PolyRat":
        return PolyRat([-c for c in self.coeffs])

    def __sub__(self, other) -> "PolyRat":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "PolyRat":
        return self._coerce(other) - self

    def __mul__(self, other) -> "PolyRat":
        if isinstance(other, (int, Fraction)):
            return PolyRat([c * other for c in self.coeffs])
        o = self._coerce(other)
        if not self.coeffs or not o.coeffs:
            return PolyRat()
        out = [Fraction(0)] * (len(self) + len(o) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[i + j] += a * b
        return PolyRat(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "PolyRat":
        if k < 0:
            raise ValueError("negative power")
        out, base = PolyRat([1]), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __call__(self, x):
        acc = 0 if not isinstance(x, np.ndarray) else np.zeros_like(x, dtype=float)
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else float(c))
        return acc

    def derivative(self) -> "PolyRat":
        return PolyRat([i * c for i, c in enumerate(self.coeffs)][1:])

    def scale_arg(self, s) -> "PolyRat":
        """Return ``x -> p(s*x)``."""
        s = Fraction(s)
        return PolyRat([c * s**i for i, c in enumerate(self.coeffs)])

    def compose(self, inner: "PolyRat") -> "PolyRat":
        out = PolyRat()
        for c in reversed(self.coeffs):
            out = out * inner + c
        return out


@lru_cache(maxsize=None)
def _hermite_exact_coeffs(n: int) -> tuple[Fraction, ...]:
    if n == 0:
        return (Fraction(1),)
    if n == 1:
        return (Fraction(0), Fraction(2))
    h1 = PolyRat(_hermite_exact_coeffs(n - 1))
    h2 = PolyRat(_hermite_exact_coeffs(n - 2))
    return (PolyRat.monomial(1, 2) * h1 - h2 * (2 * (n - 1))).coeffs


def hermite_poly_exact(n: int) -> PolyRat:
    """Physicists' Hermite polynomial ``H_n`` with exact integer coefficients."""
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    return PolyRat(_hermite_exact_coeffs(n))


@lru_cache(maxsize=None)
def _hermite_imag_coeffs(n: int) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * (n + 1)
    for j in range(n // 2 + 1):
        out[n - 2 * j] = Fraction(
            math.factorial(n) * 2 ** (n - 2 * j),
            math.factorial(j) * math.factorial(n - 2 * j),
        )
    return tuple(out)


def hermite_imag_reduced(n: int) -> PolyRat:
    """Real polynomial ``P_n`` with ``H_n(i r) = i**n * P_n(r)``.

    All coefficients are nonnegative integers:
    ``P_n(r) = sum_j n!/(j!(n-2j)!) (2r)**(n-2j)``.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    return PolyRat(_hermite_imag_coeffs(n))


# --------------------------------------------------------------------------
# floating point Hermite
# --------------------------------------------------------------------------


def hermite_poly(n: int, x):
    """``H_n(x)`` by forward recurrence.

    Works on floats, numpy arrays, ints and Fractions; the latter two give the
    exact value.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    h_prev, h = 0 * x + 1, 2 * x
    if n == 0:
        return h_prev
    for ell in range(2, n + 1):
        h_prev, h = h, 2 * x * h - 2 * (ell - 1) * h_prev
    return h


@dataclass(frozen=True)
class HermiteEval:
    """Value of ``phi_n(x)`` stored as ``value * exp(log_scale)``."""

    n: int
    value: float
    log_scale: float = 0.0

    def __float__(self) -> float:
        return self.value * math.exp(self.log_scale) if self.value else 0.0


def hermite_function_scaled(n: int, x: float) -> HermiteEval:
    """Hermite function ``phi_n(x)`` with an exponent ledger.

    The normalized recurrence
    ``phi_{k+1} = sqrt(2/(k+1)) x phi_k - sqrt(k/(k+1)) phi_{k-1}`` is run on
    mantissas while the Gaussian factor lives in ``log_scale``; this is what
    keeps ``n`` up to 1e4 with ``|x|`` up to 100 free of overflow.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    x = float(x)
    log_scale = -0.5 * x * x
    prev, cur = 0.0, _PI_M14
    for k in range(n):
        nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        if abs(cur) > _RESCALE_AT:
            e = math.log(abs(cur))
            prev, cur = prev * math.exp(-e), cur * math.exp(-e)
            log_scale += e
    if cur == 0.0:
        return HermiteEval(n, 0.0, 0.0)
    folded = cur * math.exp(log_scale) if log_scale > -700.0 else 0.0
    if folded != 0.0 and math.isfinite(folded) and abs(folded) > 1e-290:
        return HermiteEval(n, folded, 0.0)
    return HermiteEval(n, cur, log_scale)


def hermite_function(n: int, x: float) -> float:
    """Orthonormal Hermite function ``phi_n(x) = C_n exp(-x^2/2) H_n(x)``."""
    return float(hermite_function_scaled(n, x))


def _scaled_recurrence(n_max: int, x: np.ndarray, log0: np.ndarray) -> np.ndarray:
    out = np.empty((n_max,) + x.shape)
    if n_max == 0:
        return out
    log_scale = log0.astype(float).copy()
    prev = np.zeros_like(x, dtype=float)
    cur = np.full_like(x, _PI_M14, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        out[0] = cur * np.exp(log_scale)
        for k in range(n_max - 1):
            nxt = math.sqrt(2.0 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
            prev, cur = cur, nxt
            big = np.abs(cur) > _RESCALE_AT
            if big.any():
                e = np.log(np.abs(cur[big]))
                prev[big] *= np.exp(-e)
                cur[big] *= np.exp(-e)
                log_scale[big] += e
            out[k + 1] = cur * np.exp(log_scale)
    return out


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Array ``out[k, ...] = phi_k(x)`` for ``k < n_max`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    return _scaled_recurrence(n_max, x, -0.5 * x * x)


def normalized_hermite_polys(n_max: int, x) -> np.ndarray:
    """Array ``out[k, ...] = C_k H_k(x)`` for ``k < n_max``, ``C_k = (sqrt(pi) 2^k k!)^(-1/2)``.

    Same recurrence as :func:`hermite_functions` without the Gaussian factor;
    used when the Gaussian weight is handled analytically by the caller.
    """
    x = np.asarray(x, dtype=float)
    return _scaled_recurrence(n_max, x, np.zeros_like(x))


# --------------------------------------------------------------------------
# Laguerre
# --------------------------------------------------------------------------


def _is_half_integer(a) -> bool:
    return float(2 * a).is_integer() and int(round(2 * a)) % 2 != 0


def gamma_half_integer(z) -> float:
    """``Gamma(z)`` for ``z`` a positive integer or half-integer.

    Recursion from ``Gamma(1) = 1`` and ``Gamma(1/2) = sqrt(pi)``; the
    rational part is accumulated exactly.
    """
    z = Fraction(z)
    if z <= 0 or z.denominator not in (1, 2):
        raise ValueError(f"need a positive integer or half-integer, got {z}")
    base = Fraction(1) if z.denominator == 1 else Fraction(1, 2)
    acc = Fraction(1)
    while z > base:
        z -= 1
        acc *= z
    return float(acc) * (math.sqrt(math.pi) if base == Fraction(1, 2) else 1.0)


def _gamma(z: float) -> float:
    if _is_half_integer(z) or (float(z).is_integer() and z > 0):
        return gamma_half_integer(z)
    return math.gamma(z)


def laguerre_poly(k: int, a: float, x):
    """Generalized Laguerre polynomial ``L_k^{(a)}(x)`` by the three-term recurrence."""
    if k < 0:
        raise ValueError(f"degree must be nonnegative, got {k}")
    l_prev, l_cur = 0 * x + 1, 1 + a - x
    if k == 0:
        return l_prev
    for j in range(1, k):
        l_prev, l_cur = l_cur, ((2 * j + 1 + a - x) * l_cur - (j + a) * l_prev) / (j + 1)
    return l_cur


def laguerre_poly_exact(k: int, a) -> PolyRat:
    """``L_k^{(a)}`` with rational ``a`` as an exact polynomial."""
    a = Fraction(a)
    x = PolyRat([0, 1])
    l_prev, l_cur = PolyRat([1]), PolyRat([1 + a]) - x
    if k == 0:
        return l_prev
    for j in range(1, k):
        l_prev, l_cur = l_cur, (l_cur * (2 * j + 1 + a) - x * l_cur - l_prev * (j + a)) * Fraction(1, j + 1)
    return l_cur


def laguerre_function(k: int, a: float, x: float) -> float:
    """Orthonormal generalized Laguerre function on ``[0, inf)``.

    ``psi_k^{(a)}(x) = sqrt(k!/Gamma(k+a+1)) x^{a/2} e^{-x/2} L_k^{(a)}(x)``.
    Returns ``inf`` at the pole ``x = 0`` when ``a < 0``.
    """
    if a <= -1:
        raise ValueError(f"need a > -1, got {a}")
    if x < 0:
        raise ValueError(f"need x >= 0, got {x}")
    if x == 0:
        if a < 0:
            return math.inf
        if a > 0:
            return 0.0
    norm = math.sqrt(math.factorial(k) / _gamma(k + a + 1))
    log_env = -0.5 * x + (0.5 * a * math.log(x) if x > 0 else 0.0)
    return norm * math.exp(log_env) * laguerre_poly(k, a, float(x))


def laguerre_functions(m: int, a: float, x) -> np.ndarray:
    """Array ``out[k, ...] = psi_k^{(a)}(x)`` for ``k < m``, ``x > 0``.

    Runs the recurrence for ``l_k = sqrt(k!/Gamma(k+a+1)) L_k^{(a)}``:
    ``sqrt((k+1)(k+a+1)) l_{k+1} = (2k+1+a-x) l_k - sqrt(k(k+a)) l_{k-1}``.
    """
    x = np.asarray(x, dtype=float)
    poly = _normalized_laguerre(m, a, x)
    with np.errstate(divide="ignore", under="ignore"):
        env = np.exp(0.5 * a * np.log(x) - 0.5 * x)
    return poly * env


def _normalized_laguerre(m: int, a: float, x: np.ndarray) -> np.ndarray:
    out = np.empty((m,) + x.shape)
    if m == 0:
        return out
    prev = np.zeros_like(x)
    cur = np.full_like(x, 1.0 / math.sqrt(_gamma(a + 1)))
    out[0] = cur
    for k in range(m - 1):
        nxt = ((2 * k + 1 + a - x) * cur - math.sqrt(k * (k + a)) * prev) / math.sqrt((k + 1) * (k + a + 1))
        prev, cur = cur, nxt
        out[k + 1] = cur
    return out


# --------------------------------------------------------------------------
# erfc and quadrature
# --------------------------------------------------------------------------


def erfc(x):
    """Complementary error function (delegates to :func:`scipy.special.erfc`)."""
    out = special.erfc(x)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    lower: float
    description: str = ""

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("node/weight count mismatch")

    def integrate(self, f: Callable | np.ndarray) -> float:
        vals = f(self.nodes) if callable(f) else np.asarray(f)
        return vals @ self.weights

    def __len__(self) -> int:
        return len(self.nodes)


_PANEL_POINTS = 20


def _leggauss(n: int, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1, 1]; Newton-polished when ``dtype`` is wider than double."""
    x, w = np.polynomial.legendre.leggauss(n)
    if np.dtype(dtype) == np.float64:
        return x, w
    x = x.astype(dtype)
    for _ in range(3):
        p_prev, p = np.ones_like(x), x.copy()
        for k in range(1, n):
            p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
        dp = n * (x * p - p_prev) / (x * x - 1)
        x = x - p / dp
    p_prev, p = np.ones_like(x), x.copy()
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    dp = n * (x * p - p_prev) / (x * x - 1)
    return x, 2 / ((1 - x * x) * dp * dp)


def gauss_legendre_rule(
    a: float, b: float, points: int, panel_points: int = _PANEL_POINTS, dtype=np.float64
) -> QuadratureRule:
    """Composite Gauss-Legendre rule with ``points`` total nodes on ``[a, b]``."""
    if points < 2:
        raise ValueError(f"need at least 2 quadrature points, got {points}")
    if not b > a:
        raise ValueError(f"empty interval [{a}, {b}]")
    per = min(points, panel_points)
    panels = max(1, math.ceil(points / per))
    x, w = _leggauss(per, dtype)
    edges = np.linspace(a, b, panels + 1).astype(dtype)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights, float(a), f"gauss-legendre {panels}x{per} on [{a:g}, {b:g}]")


def tail_for_degree(degree: int) -> float:
    """Truncation length after which ``z**degree * exp(-z**2)`` is below 1e-17 of its mass."""
    return 8.0 + math.sqrt(max(degree, 0) / 2.0)


def semi_infinite_rule(r: float, points: int = 200, tail: float = 8.0, dtype=np.float64) -> QuadratureRule:
    """Rule for ``int_r^inf f(z) exp(-z^2) dz`` (the weight is *not* folded in).

    The integral is truncated to ``[r, r + T]`` with ``T = max(tail, r + tail)``.
    A very negative ``r`` is clipped to ``-tail`` since the Gaussian weight
    is negligible beyond it.
    """
    if points < 2:
        raise ValueError(f"need at least 2 quadrature points, got {points}")
    r = float(r)
    lo = max(r, -tail)
    hi = r + max(tail, r + tail) if r >= 0 else tail
    rule = gauss_legendre_rule(lo, hi, points, dtype=dtype)
    return QuadratureRule(rule.nodes, rule.weights, lo, f"semi-infinite from {r:g}: {rule.description}")


def real_line_rule(points: int = 400, half_width: float = 12.0) -> QuadratureRule:
    """Rule on ``[-half_width, half_width]`` for rapidly decaying integrands on the real line."""
    return gauss_legendre_rule(-half_width, half_width, points)
