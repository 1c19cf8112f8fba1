"""Finite matrices reducing the Hermite- and Laguerre-kernel Fredholm determinants.

Every determinant handled by this package is ``det(I - K)`` for a kernel of
finite rank, so it equals an ordinary determinant of a small matrix.  The
builders here produce those matrices:

* :func:`m_matrix_general_p` -- the ``N x N`` reduction of the restricted
  maximum kernel at ``p in (0, 1)``;
* :func:`q_matrix_closed` / :func:`q_matrix_quadrature` and
  :func:`f_matrix` -- the factorization ``M = Q F`` in the ``p -> 0`` limit;
* :func:`s_matrix`, :func:`t_matrix`, :func:`a_matrix` -- the rank-reduction
  matrices with ``2TS = F``, ``ST = I`` and ``2SQT = A``;
* :func:`laguerre_kernel_matrix` -- the Gram matrix of the Laguerre kernel
  restricted to ``(x, inf)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .orthopoly import (
    erfc,
    hermite_functions,
    hermite_imag_reduced,
    hermite_poly,
    normalized_hermite_polys,
    semi_infinite_rule,
    tail_for_degree,
    _normalized_laguerre,
)

__all__ = [
    "KernelMatrix",
    "ParitySplit",
    "parity_split",
    "m_matrix_from_shift",
    "m_matrix_general_p",
    "m_matrix_limit",
    "q_matrix_closed",
    "q_matrix_quadrature",
    "f_matrix",
    "s_matrix",
    "t_matrix",
    "t_matrix_complex",
    "a_matrix",
    "laguerre_kernel_matrix",
    "DEFAULT_POINTS",
]

DEFAULT_POINTS = 200
_SQRT_PI_LD = np.sqrt(np.longdouble("3.14159265358979323846264338327950288"))


@dataclass(frozen=True)
class KernelMatrix:
    """Dense real matrix carrying inclusive index ranges for its rows and columns."""

    label: str
    row_range: tuple[int, int]
    col_range: tuple[int, int]
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        nr = self.row_range[1] - self.row_range[0] + 1
        nc = self.col_range[1] - self.col_range[0] + 1
        if entries.shape != (nr, nc):
            raise ValueError(
                f"{self.label}: entries shape {entries.shape} does not match ranges "
                f"{self.row_range} x {self.col_range}"
            )
        if not np.all(np.isfinite(entries)):
            raise ValueError(f"{self.label}: non-finite entries")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "row_range", tuple(int(v) for v in self.row_range))
        object.__setattr__(self, "col_range", tuple(int(v) for v in self.col_range))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def is_square(self) -> bool:
        return self.row_range == self.col_range

    def __getitem__(self, idx):
        j, k = idx
        return self.entries[j - self.row_range[0], k - self.col_range[0]]

    def __matmul__(self, other: "KernelMatrix") -> "KernelMatrix":
        if self.col_range != other.row_range:
            raise ValueError(
                f"index mismatch: {self.label} columns {self.col_range} vs "
                f"{other.label} rows {other.row_range}"
            )
        return KernelMatrix(
            f"{self.label}{other.label}", self.row_range, other.col_range, self.entries @ other.entries
        )

    def __sub__(self, other: "KernelMatrix") -> "KernelMatrix":
        self._same_ranges(other)
        return KernelMatrix(f"{self.label}-{other.label}", self.row_range, self.col_range, self.entries - other.entries)

    def __add__(self, other: "KernelMatrix") -> "KernelMatrix":
        self._same_ranges(other)
        return KernelMatrix(f"{self.label}+{other.label}", self.row_range, self.col_range, self.entries + other.entries)

    def __rmul__(self, scalar: float) -> "KernelMatrix":
        return KernelMatrix(f"{scalar:g}{self.label}", self.row_range, self.col_range, scalar * self.entries)

    def _same_ranges(self, other: "KernelMatrix") -> None:
        if (self.row_range, self.col_range) != (other.row_range, other.col_range):
            raise ValueError(f"index mismatch between {self.label} and {other.label}")

    @classmethod
    def identity(cls, lo: int, hi: int, label: str = "I") -> "KernelMatrix":
        return cls(label, (lo, hi), (lo, hi), np.eye(hi - lo + 1))


@dataclass(frozen=True)
class ParitySplit:
    N: int
    b: int
    half: int

    @property
    def last(self) -> int:
        """Largest index of the reduced matrices, ``(N - b) / 2``."""
        return self.half - 1


def parity_split(N: int) -> ParitySplit:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    b = 1 if N % 2 else 2
    return ParitySplit(N, b, (N - b) // 2 + 1)


def _log_norm(n: int) -> float:
    # log C_n with C_n = (sqrt(pi) 2^n n!)^(-1/2)
    return -0.5 * (0.5 * math.log(math.pi) + n * math.log(2.0) + math.lgamma(n + 1))


# --------------------------------------------------------------------------
# general p
# --------------------------------------------------------------------------


def m_matrix_from_shift(N: int, c: float, s: float, points: int = DEFAULT_POINTS) -> KernelMatrix:
    """``M_jk = int_c^inf phi_j phi_k + int_0^inf e^{2sw} phi_j(c+w) phi_k(c-w) dw``.

    The second (reflected) term is integrated as
    ``e^{-(c-s)(c+s)} int_{-s}^inf h_j(c+s+v) h_k(c-s-v) e^{-v^2} dv`` with
    ``h_k = C_k H_k`` so that a large positive ``s`` (``p`` close to 1) neither
    overflows the exponential nor underflows the Gaussian.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not (math.isfinite(c) and math.isfinite(s)):
        raise ValueError(f"non-finite shift parameters c={c}, s={s}")
    tail = tail_for_degree(2 * (N - 1))

    rule = semi_infinite_rule(c, points, tail)
    phi = hermite_functions(N, rule.nodes)
    direct = (phi * rule.weights) @ phi.T

    rule2 = semi_infinite_rule(-s, points, tail)
    v = rule2.nodes
    left = normalized_hermite_polys(N, c + s + v)
    right = normalized_hermite_polys(N, c - s - v)
    gauss = np.exp(-v * v) * rule2.weights
    with np.errstate(under="ignore"):
        pref = math.exp(-(c - s) * (c + s))
    reflected = pref * ((left * gauss) @ right.T)
    return KernelMatrix("M", (0, N - 1), (0, N - 1), direct + reflected)


def m_matrix_general_p(N: int, r: float, alpha: float, points: int = DEFAULT_POINTS) -> KernelMatrix:
    """Matrix whose ``det(I - M)`` is ``P(sqrt(2) M_N(p) <= r)``, ``alpha = log(p/(1-p))/2``."""
    if not math.isfinite(alpha):
        raise ValueError(f"alpha must be finite, got {alpha}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    return m_matrix_from_shift(N, r * math.cosh(alpha), r * math.sinh(alpha), points)


def m_matrix_limit(N: int, r: float, points: int = DEFAULT_POINTS) -> KernelMatrix:
    """``p -> 0`` shape of :func:`m_matrix_general_p`: shift ``c = r``, ``s = -r``."""
    return m_matrix_from_shift(N, r, -r, points)


# --------------------------------------------------------------------------
# p -> 0: Q, F, S, T, A
# --------------------------------------------------------------------------


def q_matrix_closed(N: int, r: float) -> KernelMatrix:
    """``Q_jk = C_j^2 int_r^inf H_j H_k e^{-z^2} dz`` in closed form.

    Expands ``H_j H_k`` by the product formula and integrates each term with
    ``int_r^inf H_l e^{-z^2} = H_{l-1}(r) e^{-r^2}`` (``l >= 1``); the
    ``l = 0`` term only appears on the diagonal and contributes ``erfc(r)/2``.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    r = float(r)
    h = np.array([hermite_poly(n, r) for n in range(max(2 * N - 2, 1))])
    g = math.exp(-r * r)
    half_erfc = 0.5 * erfc(r)
    q = np.zeros((N, N))
    for j in range(N):
        cj2 = math.exp(2 * _log_norm(j))
        for k in range(N):
            acc = 0.0
            for ell in range(min(j, k) + 1):
                deg = j + k - 2 * ell
                if deg == 0:
                    continue
                acc += 2.0**ell * math.factorial(ell) * math.comb(j, ell) * math.comb(k, ell) * h[deg - 1]
            q[j, k] = cj2 * acc * g
        q[j, j] += half_erfc
    return KernelMatrix("Q", (0, N - 1), (0, N - 1), q)


def q_matrix_quadrature(N: int, r: float, points: int = DEFAULT_POINTS) -> KernelMatrix:
    """Direct quadrature of the defining integral of ``Q``; oracle for :func:`q_matrix_closed`.

    Runs in extended precision: entries with ``j < k`` are large cancelling
    integrals (``Q_{0,11}(0)`` is about 1.7e4) and double-precision rounding
    alone would be ~1e-11 there.
    """
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    ld = np.longdouble
    rule = semi_infinite_rule(r, points, tail_for_degree(2 * (N - 1)), dtype=ld)
    z = rule.nodes
    h = np.empty((N, len(z)), dtype=ld)
    h[0] = 1
    if N > 1:
        h[1] = 2 * z
    for n in range(2, N):
        h[n] = 2 * z * h[n - 1] - 2 * (n - 1) * h[n - 2]
    cj2 = np.array([1 / (_SQRT_PI_LD * ld(2) ** j * ld(math.factorial(j))) for j in range(N)], dtype=ld)
    wg = rule.weights * np.exp(-z * z)
    q = (cj2[:, None] * h * wg) @ h.T
    return KernelMatrix("Q", (0, N - 1), (0, N - 1), q.astype(float))


def f_matrix(N: int, r: float) -> KernelMatrix:
    """Upper triangular ``F_jk = binom(k, j) (4r)^{k-j} (-1)^j [j <= k] + delta_jk``."""
    f = np.zeros((N, N))
    for j in range(N):
        for k in range(j, N):
            f[j, k] = math.comb(k, j) * (4.0 * r) ** (k - j) * (-1) ** j
        f[j, j] += 1.0
    return KernelMatrix("F", (0, N - 1), (0, N - 1), f)


def _inv_factorial(m: int) -> float:
    return 0.0 if m < 0 else 1.0 / math.factorial(m)


def s_matrix(N: int, r: float) -> KernelMatrix:
    """``S_jt = t! / (4^j (t-N+2j+b)!) H_{t-N+2j+b}(r)``, zero for negative indices."""
    ps = parity_split(N)
    s = np.zeros((ps.half, N))
    for j in range(ps.half):
        for t in range(N):
            d = t - N + 2 * j + ps.b
            if d >= 0:
                s[j, t] = math.factorial(t) * _inv_factorial(d) / 4.0**j * hermite_poly(d, float(r))
    return KernelMatrix("S", (0, ps.last), (0, N - 1), s)


def t_matrix(N: int, r: float, check: bool = True) -> KernelMatrix:
    """``T`` evaluated over the reals.

    With ``H_n(ir) = i^n P_n(r)`` the phases in the definition collapse to
    ``T_uk = (-1)^u 4^k P_{N-2k-b-u}(r) / (u! (N-2k-b-u)!)``.  With
    ``check=True`` the result is compared with the complex-arithmetic
    evaluation (:func:`t_matrix_complex`).
    """
    ps = parity_split(N)
    t = np.zeros((N, ps.half))
    for u in range(N):
        for k in range(ps.half):
            n = N - 2 * k - ps.b - u
            if n >= 0:
                t[u, k] = (-1) ** u * 4.0**k * float(hermite_imag_reduced(n)(float(r))) * _inv_factorial(u) * _inv_factorial(n)
    if check:
        tc = t_matrix_complex(N, r)
        scale = max(1.0, float(np.abs(t).max()))
        if np.abs(tc.imag).max() > 1e-12 * scale or np.abs(tc.real - t).max() > 1e-12 * scale:
            raise RuntimeError(f"real reduction of T disagrees with complex evaluation (N={N}, r={r})")
    return KernelMatrix("T", (0, N - 1), (0, ps.last), t)


def t_matrix_complex(N: int, r: float) -> np.ndarray:
    """``T`` straight from its definition in complex arithmetic (complex array)."""
    ps = parity_split(N)
    t = np.zeros((N, ps.half), dtype=complex)
    half = (N - ps.b) // 2
    for u in range(N):
        for k in range(ps.half):
            n = N - 2 * k - ps.b - u
            if n >= 0:
                t[u, k] = (
                    (-1) ** (half + k) * (-1j) ** u * 4.0**k * _inv_factorial(u) * _inv_factorial(n)
                    * hermite_poly(n, 1j * float(r))
                )
    return t


def a_matrix(N: int, r: float) -> KernelMatrix:
    """``A_jk = 2 Q_{2j+b-1, 2k+b-1}`` (closed-form ``Q``)."""
    ps = parity_split(N)
    q = q_matrix_closed(N, r).entries
    idx = 2 * np.arange(ps.half) + ps.b - 1
    return KernelMatrix("A", (0, ps.last), (0, ps.last), 2.0 * q[np.ix_(idx, idx)])


# --------------------------------------------------------------------------
# Laguerre side
# --------------------------------------------------------------------------


def laguerre_kernel_matrix(m: int, a: float, x: float, points: int = DEFAULT_POINTS) -> KernelMatrix:
    """``G_jk = int_x^inf psi_j^{(a)} psi_k^{(a)}``.

    Integrated in ``z = sqrt(u)``, which turns the ``u^a`` endpoint behaviour
    into the smooth factor ``2 z^{2a+1}`` for ``a = -1/2, 1/2``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if a <= -1:
        raise ValueError(f"need a > -1, got {a}")
    if x < 0:
        raise ValueError(f"need x >= 0, got {x}")
    rule = semi_infinite_rule(math.sqrt(x), points, tail_for_degree(4 * (m - 1) + 2))
    z = rule.nodes
    ell = _normalized_laguerre(m, a, z * z)
    w = rule.weights * 2.0 * z ** (2 * a + 1) * np.exp(-z * z)
    return KernelMatrix("G", (0, m - 1), (0, m - 1), (ell * w) @ ell.T)
