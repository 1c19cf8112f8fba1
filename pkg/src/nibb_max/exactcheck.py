"""Exact verification of the matrix and Hermite-polynomial identities.

Everything here is rational: matrices hold :class:`fractions.Fraction`
entries, polynomials are :class:`~nibb_max.orthopoly.PolyRat` /
:class:`BiPolyRat`, and Hermite values at imaginary arguments are tracked as
Gaussian-rational polynomials (:class:`GaussPoly`) through
``H_n(i r) = i^n P_n(r)``.  Floats are rejected at the boundary.

The transcendental parts of ``Q`` (``erfc`` and ``e^{-r^2}``) are removed
before the rank-reduction identity is checked: with ``ST = I`` established
first, ``2SQT = A`` reduces to ``2 S R T = R_A`` for the rational matrices
``R = sqrt(pi) e^{r^2} (Q - erfc(r)/2 I)`` and ``R_A`` built from ``R`` the
same way ``A`` is built from ``Q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .orthopoly import PolyRat, hermite_imag_reduced, hermite_poly_exact, laguerre_poly_exact

__all__ = [
    "RatMatrix",
    "BiPolyRat",
    "GaussPoly",
    "parse_rational",
    "hermite_at_i",
    "exact_f",
    "exact_s",
    "exact_t",
    "exact_t_gaussian",
    "exact_r_tilde",
    "exact_r_a",
    "exact_ts_is_f",
    "exact_st_is_identity",
    "exact_sqt_is_a",
    "lemma1_identities",
    "lemma1_parts",
    "lemma2_identities",
    "lemma2_part_i",
    "lemma2_part_ii",
    "auxiliary_identities",
    "run_suite",
]


def _rat(v) -> Fraction:
    if isinstance(v, (float, complex)):
        raise TypeError(f"floating-point value {v!r} not allowed in exact checks")
    return Fraction(v)


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer/decimal literal into an exact rational."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        if int(den) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(text)


# --------------------------------------------------------------------------
# exact containers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RatMatrix:
    """Dense matrix of exact rationals with inclusive index ranges."""

    entries: tuple[tuple[Fraction, ...], ...]
    row_range: tuple[int, int]
    col_range: tuple[int, int]

    @classmethod
    def build(cls, rows: Sequence[Sequence], row_range=None, col_range=None) -> "RatMatrix":
        ent = tuple(tuple(_rat(v) for v in row) for row in rows)
        nr, nc = len(ent), (len(ent[0]) if ent else 0)
        if any(len(row) != nc for row in ent):
            raise ValueError("ragged matrix")
        return cls(ent, row_range or (0, nr - 1), col_range or (0, nc - 1))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls.build([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.col_range != other.row_range:
            raise ValueError(f"index mismatch {self.col_range} vs {other.row_range}")
        cols = list(zip(*other.entries))
        rows = [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self.entries]
        return RatMatrix.build(rows, self.row_range, other.col_range)

    def __rmul__(self, scalar) -> "RatMatrix":
        s = _rat(scalar)
        return RatMatrix.build([[s * v for v in row] for row in self.entries], self.row_range, self.col_range)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        if (self.row_range, self.col_range) != (other.row_range, other.col_range):
            raise ValueError("index mismatch")
        return RatMatrix.build(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)],
            self.row_range,
            self.col_range,
        )

    def first_difference(self, other: "RatMatrix"):
        """``None`` if equal, else ``(j, k, self_jk, other_jk)`` for the first differing entry."""
        if self.shape != other.shape:
            return ("shape", self.shape, other.shape)
        for j, (r1, r2) in enumerate(zip(self.entries, other.entries)):
            for k, (a, b) in enumerate(zip(r1, r2)):
                if a != b:
                    return (j + self.row_range[0], k + self.col_range[0], str(a), str(b))
        return None


@dataclass(frozen=True, init=False)
class BiPolyRat:
    """Polynomial in two indeterminates ``x, y``: ``{(i, j): coefficient of x^i y^j}``."""

    terms: tuple[tuple[tuple[int, int], Fraction], ...]

    def __init__(self, terms: dict | Iterable = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[tuple[int, int], Fraction] = {}
        for key, c in items:
            acc[key] = acc.get(key, Fraction(0)) + _rat(c)
        object.__setattr__(self, "terms", tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @classmethod
    def in_x(cls, p: PolyRat) -> "BiPolyRat":
        return cls({(i, 0): c for i, c in enumerate(p.coeffs)})

    @classmethod
    def in_y(cls, p: PolyRat) -> "BiPolyRat":
        return cls({(0, i): c for i, c in enumerate(p.coeffs)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "BiPolyRat") -> "BiPolyRat":
        return BiPolyRat(list(self.terms) + list(other.terms))

    def __sub__(self, other: "BiPolyRat") -> "BiPolyRat":
        return BiPolyRat(list(self.terms) + [(k, -v) for k, v in other.terms])

    def __mul__(self, other) -> "BiPolyRat":
        if not isinstance(other, BiPolyRat):
            s = _rat(other)
            return BiPolyRat([(k, v * s) for k, v in self.terms])
        out: dict[tuple[int, int], Fraction] = {}
        for (i1, j1), a in self.terms:
            for (i2, j2), b in other.terms:
                key = (i1 + i2, j1 + j2)
                out[key] = out.get(key, Fraction(0)) + a * b
        return BiPolyRat(out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class GaussPoly:
    """``re(x) + i im(x)`` with real rational polynomial parts."""

    re: PolyRat
    im: PolyRat

    @classmethod
    def real(cls, p: PolyRat) -> "GaussPoly":
        return cls(p, PolyRat())

    @classmethod
    def i_power(cls, k: int, p: PolyRat | None = None) -> "GaussPoly":
        """``i^k * p``."""
        p = PolyRat([1]) if p is None else p
        k %= 4
        if k == 0:
            return cls(p, PolyRat())
        if k == 1:
            return cls(PolyRat(), p)
        if k == 2:
            return cls(-p, PolyRat())
        return cls(PolyRat(), -p)

    def __add__(self, other: "GaussPoly") -> "GaussPoly":
        return GaussPoly(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussPoly") -> "GaussPoly":
        return GaussPoly(self.re - other.re, self.im - other.im)

    def __mul__(self, other) -> "GaussPoly":
        if isinstance(other, GaussPoly):
            return GaussPoly(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)
        return GaussPoly(self.re * other, self.im * other)

    __rmul__ = __mul__

    def __call__(self, x) -> tuple[Fraction, Fraction]:
        x = _rat(x)
        return self.re(x), self.im(x)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()


ZERO = GaussPoly(PolyRat(), PolyRat())


def hermite_at_i(n: int) -> GaussPoly:
    """``r -> H_n(i r)`` as a Gaussian-rational polynomial in ``r``."""
    return GaussPoly.i_power(n, hermite_imag_reduced(n))


def _h(n: int) -> PolyRat:
    return hermite_poly_exact(n) if n >= 0 else PolyRat()


def _inv_fact(m: int) -> Fraction:
    return Fraction(0) if m < 0 else Fraction(1, math.factorial(m))


# --------------------------------------------------------------------------
# S, T, F, Q-tilde at rational r
# --------------------------------------------------------------------------


def _parity(N: int) -> tuple[int, int]:
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    b = 1 if N % 2 else 2
    return b, (N - b) // 2


def exact_f(N: int, r) -> RatMatrix:
    r = _rat(r)
    rows = [
        [(math.comb(k, j) * (4 * r) ** (k - j) * (-1) ** j if j <= k else 0) + (1 if j == k else 0) for k in range(N)]
        for j in range(N)
    ]
    return RatMatrix.build(rows)


def exact_s(N: int, r) -> RatMatrix:
    r = _rat(r)
    b, last = _parity(N)
    rows = []
    for j in range(last + 1):
        row = []
        for t in range(N):
            d = t - N + 2 * j + b
            row.append(Fraction(math.factorial(t), 4**j) * _inv_fact(d) * _h(d)(r))
        rows.append(row)
    return RatMatrix.build(rows, (0, last), (0, N - 1))


def exact_t(N: int, r) -> RatMatrix:
    """``T`` through the phase-free form ``(-1)^u 4^k P_n(r) / (u! n!)``, ``n = N-2k-b-u``."""
    r = _rat(r)
    b, last = _parity(N)
    rows = []
    for u in range(N):
        row = []
        for k in range(last + 1):
            n = N - 2 * k - b - u
            val = (-1) ** u * 4**k * _inv_fact(u) * _inv_fact(n) * (hermite_imag_reduced(n)(r) if n >= 0 else 0)
            row.append(val)
        rows.append(row)
    return RatMatrix.build(rows, (0, N - 1), (0, last))


def exact_t_gaussian(N: int, r) -> list[list[tuple[Fraction, Fraction]]]:
    """``T`` from its definition with Gaussian-rational arithmetic, as (real, imag) pairs."""
    r = _rat(r)
    b, last = _parity(N)
    half = (N - b) // 2
    out = []
    for u in range(N):
        row = []
        for k in range(last + 1):
            n = N - 2 * k - b - u
            if n < 0:
                row.append((Fraction(0), Fraction(0)))
                continue
            coeff = (-1) ** (half + k) * 4**k * _inv_fact(u) * _inv_fact(n)
            val = GaussPoly.i_power(3 * u) * hermite_at_i(n) * coeff
            row.append(val(r))
        out.append(row)
    return out


def exact_r_tilde(N: int, r) -> RatMatrix:
    """``sqrt(pi) e^{r^2} (Q - erfc(r)/2 I)``: rational for rational ``r``."""
    r = _rat(r)
    hv = [_h(n)(r) for n in range(max(2 * N - 2, 1))]
    rows = []
    for j in range(N):
        row = []
        for k in range(N):
            acc = Fraction(0)
            for ell in range(min(j, k) + 1):
                deg = j + k - 2 * ell
                if deg >= 1:
                    acc += 2**ell * math.factorial(ell) * math.comb(j, ell) * math.comb(k, ell) * hv[deg - 1]
            row.append(acc / (2**j * math.factorial(j)))
        rows.append(row)
    return RatMatrix.build(rows)


def exact_r_a(N: int, r) -> RatMatrix:
    """``sqrt(pi) e^{r^2} (A - erfc(r) I)``, i.e. ``2 R_{2j+b-1, 2k+b-1}``."""
    b, last = _parity(N)
    rt = exact_r_tilde(N, r).entries
    idx = [2 * j + b - 1 for j in range(last + 1)]
    return RatMatrix.build([[2 * rt[i][k] for k in idx] for i in idx])


def exact_ts_is_f(N: int, r) -> bool:
    return (2 * (exact_t(N, r) @ exact_s(N, r))).first_difference(exact_f(N, r)) is None


def exact_st_is_identity(N: int, r) -> bool:
    b, last = _parity(N)
    return (exact_s(N, r) @ exact_t(N, r)).first_difference(RatMatrix.identity(last + 1)) is None


def exact_sqt_is_a(N: int, r) -> bool:
    if not exact_st_is_identity(N, r):
        return False
    lhs = 2 * (exact_s(N, r) @ exact_r_tilde(N, r) @ exact_t(N, r))
    return lhs.first_difference(exact_r_a(N, r)) is None


# --------------------------------------------------------------------------
# Lemmas
# --------------------------------------------------------------------------


def lemma1_parts(m: int, d: int | None = None) -> dict[str, bool]:
    """Evaluate each applicable part of the binomial-Hermite lemma as exact polynomial identities."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if d is not None and d + m < 0:
        raise ValueError(f"need d + m >= 0, got d={d}, m={m}")
    out: dict[str, bool] = {}
    four_r_m = PolyRat.monomial(m, Fraction(4) ** m)
    if m > 0:
        odd = ZERO
        even = ZERO
        for s in range(m // 2 + 1):
            if 2 * s + 1 <= m:
                odd = odd + hermite_at_i(m - 2 * s - 1) * (hermite_poly_exact(2 * s + 1) * (math.comb(m, 2 * s + 1) * (-1) ** s))
            even = even + hermite_at_i(m - 2 * s) * (hermite_poly_exact(2 * s) * (math.comb(m, 2 * s) * (-1) ** s))
        out["1-odd"] = (odd - GaussPoly.i_power(m - 1, four_r_m * Fraction(1, 2))).is_zero()
        out["1-even"] = (even - GaussPoly.i_power(m, four_r_m * Fraction(1, 2))).is_zero()
    lhs = ZERO
    for t in range(m + 1):
        lhs = lhs + GaussPoly.i_power(3 * t, hermite_poly_exact(t) * math.comb(m, t)) * hermite_at_i(m - t)
    out["2"] = (lhs - GaussPoly.real(PolyRat([int(m == 0)]))).is_zero()
    if d is not None:
        lhs = ZERO
        for u in range(m + 1):
            lhs = lhs + GaussPoly.i_power(3 * u, _h(u + m + d) * math.comb(m, u)) * hermite_at_i(m - u)
        rhs_real = _h(d) * (2**m * math.factorial(m + d) * _inv_fact(d))
        out["3"] = (lhs - GaussPoly.i_power(m, rhs_real)).is_zero()
    return out


def lemma1_identities(m: int, d: int | None = None) -> bool:
    return all(lemma1_parts(m, d).values())


def lemma2_part_i(t: int, m: int) -> bool:
    if not t >= m + 1 >= 1:
        raise ValueError(f"part (i) needs t >= m + 1 >= 1, got t={t}, m={m}")
    total = sum((-1) ** ell * math.comb(t, ell) * math.comb(t - ell - 1, m - ell) for ell in range(m + 1))
    return total == (-1) ** m


def lemma2_part_ii(t: int, k: int, h: int) -> bool:
    if min(t, k, h) < 0:
        raise ValueError("part (ii) needs nonnegative parameters")
    lhs = sum(
        (-1) ** u * math.factorial(t + u) * _inv_fact(u) * _inv_fact(k - u) * _inv_fact(t + u - h) for u in range(k + 1)
    )
    binom = math.comb(t, h - k) if h - k >= 0 else 0
    rhs = (-1) ** k * Fraction(math.factorial(h), math.factorial(k)) * binom
    return lhs == rhs


def lemma2_identities(t: int, m: int, k: int, h: int) -> bool:
    return lemma2_part_i(t, m) and lemma2_part_ii(t, k, h)


# --------------------------------------------------------------------------
# auxiliary identities
# --------------------------------------------------------------------------


def _umbral(n: int, alpha: Fraction) -> PolyRat:
    """``H_n^{[alpha]}(x) = (alpha/2)^{n/2} H_n(x / sqrt(2 alpha))``, expanded to rational coefficients."""
    c = [Fraction(0)] * (n + 1)
    for j in range(n // 2 + 1):
        c[n - 2 * j] = (-1) ** j * Fraction(math.factorial(n), math.factorial(j) * math.factorial(n - 2 * j)) * (alpha / 2) ** j
    return PolyRat(c)


def _result(name: str, params: dict, counterexample=None) -> dict:
    rec = {"identity": name, "parameters": params, "pass": counterexample is None}
    if counterexample is not None:
        rec["counterexample"] = counterexample
    return rec


def _first_failure(cases):
    for params, ok in cases:
        if not ok:
            return params
    return None


def auxiliary_identities(n_max: int) -> list[dict]:
    """Check the auxiliary Hermite/binomial identities for all degrees up to ``n_max``.

    Returns one record per identity with ``pass`` and, on failure, the first
    counterexample.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    H = hermite_poly_exact
    x = PolyRat([0, 1])
    rng = range(n_max + 1)
    out = []

    def product_cases():
        for j in rng:
            for k in rng:
                rhs = PolyRat()
                for ell in range(min(j, k) + 1):
                    rhs = rhs + H(j + k - 2 * ell) * (2**ell * math.factorial(ell) * math.comb(j, ell) * math.comb(k, ell))
                yield {"j": j, "k": k}, H(j) * H(k) == rhs

    out.append(_result("hermite-product", {"n_max": n_max}, _first_failure(product_cases())))

    def translation_cases():
        for n in rng:
            lhs = BiPolyRat()
            for i, c in enumerate(H(n).coeffs):
                # (x + y)^i
                lhs = lhs + BiPolyRat({(a, i - a): c * math.comb(i, a) for a in range(i + 1)})
            rhs = BiPolyRat()
            for k in range(n + 1):
                rhs = rhs + BiPolyRat.in_x(H(k)) * BiPolyRat({(0, n - k): math.comb(n, k) * 2 ** (n - k)})
            yield {"n": n}, (lhs - rhs).is_zero()

    out.append(_result("hermite-translation", {"n_max": n_max}, _first_failure(translation_cases())))

    def gamma_cases():
        for gamma in (Fraction(2), Fraction(1, 3), Fraction(-3, 2)):
            for n in rng:
                rhs = PolyRat()
                for ell in range(n // 2 + 1):
                    coeff = gamma ** (n - 2 * ell) * (gamma**2 - 1) ** ell * math.comb(n, 2 * ell) * Fraction(math.factorial(2 * ell), math.factorial(ell))
                    rhs = rhs + H(n - 2 * ell) * coeff
                yield {"gamma": str(gamma), "n": n}, H(n).scale_arg(gamma) == rhs
        for n in rng:
            rhs = ZERO
            for ell in range(n // 2 + 1):
                # gamma = i: gamma^{n-2l} (gamma^2 - 1)^l = i^{n-2l} (-2)^l
                coeff = (-2) ** ell * math.comb(n, 2 * ell) * Fraction(math.factorial(2 * ell), math.factorial(ell))
                rhs = rhs + GaussPoly.i_power(n - 2 * ell, H(n - 2 * ell) * coeff)
            yield {"gamma": "i", "n": n}, (hermite_at_i(n) - rhs).is_zero()

    out.append(_result("hermite-gamma-scaling", {"n_max": n_max}, _first_failure(gamma_cases())))

    def umbral_cases():
        for alpha in (Fraction(1, 2), Fraction(-1, 2), Fraction(1), Fraction(-1)):
            for n in rng:
                lhs = BiPolyRat()
                for s in range(n + 1):
                    lhs = lhs + BiPolyRat.in_x(_umbral(s, alpha)) * BiPolyRat.in_y(_umbral(n - s, -alpha)) * math.comb(n, s)
                binom = BiPolyRat({(a, n - a): math.comb(n, a) for a in range(n + 1)})
                yield {"alpha": str(alpha), "n": n}, (lhs - binom).is_zero()
        for n in rng:
            yield {"relation": "H_n = 2^n H^[1/2]_n", "n": n}, H(n) == _umbral(n, Fraction(1, 2)) * 2**n
            # H_n(ir) = (-i)^n 2^n H^[-1/2]_n(-r)
            rhs = GaussPoly.i_power(3 * n, _umbral(n, Fraction(-1, 2)).scale_arg(-1) * 2**n)
            yield {"relation": "H_n(ir) = (-i)^n 2^n H^[-1/2]_n(-r)", "n": n}, (hermite_at_i(n) - rhs).is_zero()

    out.append(_result("umbral-binomial", {"n_max": n_max}, _first_failure(umbral_cases())))

    def hockey_cases():
        for t in rng:
            for s in range(t, n_max + 1):
                yield {"t": t, "s": s}, sum(math.comb(i, t) for i in range(t, s + 1)) == math.comb(s + 1, t + 1)

    out.append(_result("hockey-stick", {"n_max": n_max}, _first_failure(hockey_cases())))

    def antiderivative_cases():
        # d/dz[-H_{l-1}(z) e^{-z^2}] = H_l(z) e^{-z^2}  <=>  2z H_{l-1} - H'_{l-1} = H_l
        for ell in range(1, n_max + 1):
            yield {"l": ell}, x * H(ell - 1) * 2 - H(ell - 1).derivative() == H(ell)

    out.append(_result("hermite-tail-integral", {"n_max": n_max}, _first_failure(antiderivative_cases())))

    def laguerre_cases():
        z2 = PolyRat([0, 0, 1])
        for n in rng:
            lm = laguerre_poly_exact(n, Fraction(-1, 2)).compose(z2)
            yield {"a": "-1/2", "n": n}, lm * (2 ** (2 * n) * math.factorial(n) * (-1) ** n) == H(2 * n)
            lp = laguerre_poly_exact(n, Fraction(1, 2)).compose(z2)
            yield {"a": "1/2", "n": n}, x * lp * (2 ** (2 * n + 1) * math.factorial(n) * (-1) ** n) == H(2 * n + 1)

    out.append(_result("laguerre-hermite", {"n_max": n_max}, _first_failure(laguerre_cases())))
    return out


# --------------------------------------------------------------------------
# suite
# --------------------------------------------------------------------------

DEFAULT_RS = (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(7, 3))


def run_suite(
    n_max_ts: int = 12,
    n_max_sqt: int = 10,
    rs: Sequence = DEFAULT_RS,
    lemma1_m_max: int = 20,
    lemma1_d_max: int = 10,
    lemma2_max: int = 20,
    aux_n_max: int = 15,
) -> list[dict]:
    """Run every exact check; one record per identity and parameter set (lemma sweeps are summarized)."""
    records: list[dict] = []
    for name, fn, n_max in (
        ("2TS=F", exact_ts_is_f, n_max_ts),
        ("ST=I", exact_st_is_identity, n_max_ts),
        ("2SQT=A", exact_sqt_is_a, n_max_sqt),
    ):
        for N in range(1, n_max + 1):
            for r in rs:
                params = {"N": N, "r": str(Fraction(r))}
                records.append(_result(name, params, None if fn(N, r) else params))

    fail = None
    for m in range(lemma1_m_max + 1):
        for d in range(-m, lemma1_d_max + 1):
            parts = lemma1_parts(m, d)
            bad = [p for p, ok in parts.items() if not ok]
            if bad:
                fail = {"m": m, "d": d, "parts": bad}
                break
        if fail:
            break
    records.append(_result("lemma1", {"m_max": lemma1_m_max, "d_range": [-lemma1_m_max, lemma1_d_max]}, fail))

    fail = None
    for t in range(lemma2_max + 1):
        for m in range(min(t - 1, lemma2_max) + 1):
            if not lemma2_part_i(t, m):
                fail = {"part": "i", "t": t, "m": m}
                break
        if fail:
            break
    records.append(_result("lemma2-i", {"max": lemma2_max}, fail))
    fail = None
    for t in range(lemma2_max + 1):
        for k in range(lemma2_max + 1):
            for h in range(lemma2_max + 1):
                if not lemma2_part_ii(t, k, h):
                    fail = {"part": "ii", "t": t, "k": k, "h": h}
                    break
            if fail:
                break
        if fail:
            break
    records.append(_result("lemma2-ii", {"max": lemma2_max}, fail))

    records.extend(auxiliary_identities(aux_n_max))
    return records
