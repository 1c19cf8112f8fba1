import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import erfc

from nibb_max.kernels import (
    KernelMatrix,
    a_matrix,
    f_matrix,
    laguerre_kernel_matrix,
    m_matrix_general_p,
    m_matrix_limit,
    parity_split,
    q_matrix_closed,
    q_matrix_quadrature,
    s_matrix,
    t_matrix,
    t_matrix_complex,
)

R_GRID = [0.0, 0.3, 1.0, 2.5]


def log_c(n):
    return -0.5 * (0.5 * math.log(math.pi) + n * math.log(2) + math.lgamma(n + 1))


# ---------------------------------------------------------------- containers


def test_kernel_matrix_validates_shape_and_is_readonly():
    with pytest.raises(ValueError):
        KernelMatrix("X", (0, 1), (0, 2), np.zeros((2, 2)))
    with pytest.raises(ValueError):
        KernelMatrix("X", (0, 0), (0, 0), np.array([[np.nan]]))
    m = KernelMatrix("X", (0, 1), (0, 1), np.eye(2))
    with pytest.raises(ValueError):
        m.entries[0, 0] = 3.0


def test_mismatched_ranges_are_rejected():
    s = s_matrix(4, 0.5)
    with pytest.raises(ValueError):
        s @ s
    assert (s @ t_matrix(4, 0.5)).shape == (2, 2)


@pytest.mark.parametrize("N", range(1, 15))
def test_parity_split(N):
    ps = parity_split(N)
    assert ps.b == (1 if N % 2 else 2)
    assert (N - ps.b) % 2 == 0 and N - ps.b >= 0
    assert ps.half == (N + 1) // 2


# ---------------------------------------------------------------- M


@pytest.mark.parametrize("alpha", [-3.0, -0.4, 0.0, 1.2])
def test_m_matrix_at_zero_is_full_mass(alpha):
    assert m_matrix_general_p(1, 0.0, alpha)[0, 0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("r", [0.0, 0.4, 1.3, 3.0])
def test_m_matrix_limit_shape_n1(r):
    assert m_matrix_limit(1, r)[0, 0] == pytest.approx(erfc(r), abs=1e-13)


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 2.0])
def test_m_matrix_decays(alpha):
    m = m_matrix_general_p(6, 8.0, alpha)
    assert np.max(np.abs(m.entries)) < 1e-10


def test_m_matrix_rejects_nonfinite_alpha():
    with pytest.raises(ValueError):
        m_matrix_general_p(2, 1.0, math.inf)
    with pytest.raises(ValueError):
        m_matrix_general_p(2, 1.0, math.nan)


@pytest.mark.parametrize("N", [1, 2, 4, 7])
@pytest.mark.parametrize("x", [0.3, 1.0, 2.2])
def test_m_matrix_small_p_converges_to_limit(N, x):
    p = 1e-6
    alpha = 0.5 * math.log(p / (1 - p))
    general = m_matrix_general_p(N, math.sqrt(2 * p) * x, alpha)
    limit = m_matrix_limit(N, x / math.sqrt(2))
    assert np.max(np.abs(general.entries - limit.entries)) < 1e-4


# ---------------------------------------------------------------- Q


@pytest.mark.parametrize("r", [0.0, 0.7, 2.0])
def test_q_examples(r):
    q = q_matrix_closed(3, r)
    assert q[0, 0] == pytest.approx(0.5 * erfc(r), abs=1e-15)
    assert q[0, 1] == pytest.approx(math.exp(-r * r) / math.sqrt(math.pi), abs=1e-15)


@pytest.mark.parametrize("N", [1, 2, 5, 8, 12])
@pytest.mark.parametrize("r", [0.0, 0.5, 1.0, 2.0])
def test_q_closed_matches_quadrature(N, r):
    diff = q_matrix_closed(N, r).entries - q_matrix_quadrature(N, r).entries
    assert np.max(np.abs(diff)) < 1e-11


def test_q_uses_row_normalization():
    # Q_jk = C_j^2 int H_j H_k e^{-z^2}: rescaling by C_k/C_j gives the symmetric Gram matrix
    N, r = 6, 0.8
    q = q_matrix_closed(N, r).entries
    c = np.exp([log_c(n) for n in range(N)])
    sym = q * c[None, :] / c[:, None]
    assert np.allclose(sym, sym.T, rtol=0, atol=1e-14)


# ---------------------------------------------------------------- F, S, T


@pytest.mark.parametrize("r", [0.0, 0.5, 1.7])
def test_f_examples(r):
    f = f_matrix(3, r)
    assert f[0, 0] == 2 and f[1, 1] == 0 and f[2, 2] == 2
    assert f[0, 1] == pytest.approx(4 * r)
    assert f[1, 2] == pytest.approx(-8 * r)
    assert f[0, 2] == pytest.approx(16 * r * r)
    assert f[1, 0] == 0


@pytest.mark.parametrize("r", [0.0, 0.5, 2.0])
def test_s_and_t_small_cases(r):
    assert np.allclose(s_matrix(2, r).entries, [[1.0, 2 * r]])
    assert np.allclose(s_matrix(3, r).entries[0], [0.0, 0.0, 2.0])
    assert np.allclose(t_matrix(2, r).entries, [[1.0], [0.0]])
    assert np.allclose((s_matrix(2, r) @ t_matrix(2, r)).entries, [[1.0]])
    two_ts = 2.0 * (t_matrix(2, r) @ s_matrix(2, r))
    assert np.allclose(two_ts.entries, [[2.0, 4 * r], [0.0, 0.0]])


@pytest.mark.parametrize("N", range(1, 15))
def test_s_zero_convention(N):
    ps = parity_split(N)
    s = s_matrix(N, 1.3)
    for j in range(ps.half):
        for t in range(N - 2 * j - ps.b):
            assert s[j, t] == 0.0


@pytest.mark.parametrize("N", range(1, 15))
@pytest.mark.parametrize("r", R_GRID)
def test_ts_equals_f(N, r):
    # 1e-10 relative to the rounding scale max(|T| |S|): products cancel terms up to ~1e13
    t, s = t_matrix(N, r), s_matrix(N, r)
    scale = np.max(np.abs(t.entries) @ np.abs(s.entries))
    assert np.max(np.abs((2.0 * (t @ s)).entries - f_matrix(N, r).entries)) < 1e-10 * max(1.0, scale)


@pytest.mark.parametrize("N", range(1, 15))
@pytest.mark.parametrize("r", R_GRID)
def test_st_equals_identity(N, r):
    s, t = s_matrix(N, r), t_matrix(N, r)
    st_ = s @ t
    scale = np.max(np.abs(s.entries) @ np.abs(t.entries))
    assert np.max(np.abs(st_.entries - np.eye(st_.shape[0]))) < 1e-10 * max(1.0, scale)


@pytest.mark.parametrize("N", range(1, 15))
@pytest.mark.parametrize("r", R_GRID)
def test_sqt_equals_a(N, r):
    s, q, t = s_matrix(N, r), q_matrix_closed(N, r), t_matrix(N, r)
    lhs = 2.0 * (s @ q @ t)
    scale = np.max(np.abs(s.entries) @ np.abs(q.entries) @ np.abs(t.entries))
    assert np.max(np.abs(lhs.entries - a_matrix(N, r).entries)) < 1e-9 * max(1.0, scale)


@pytest.mark.parametrize("N", range(1, 13))
def test_t_real_reduction_matches_complex(N):
    for r in (0.0, 0.45, 1.9):
        tc = t_matrix_complex(N, r)
        assert np.max(np.abs(tc.imag)) <= 1e-12 * max(1.0, np.max(np.abs(tc)))
        assert np.allclose(t_matrix(N, r, check=False).entries, tc.real, rtol=1e-12, atol=1e-300)


@pytest.mark.parametrize("N", range(1, 13))
@pytest.mark.parametrize("r", [0.2, 1.0, 2.0])
def test_qf_rank(N, r):
    sv = np.linalg.svd((q_matrix_closed(N, r) @ f_matrix(N, r)).entries, compute_uv=False)
    k = (N + 1) // 2
    assert np.all(sv[k:] < 1e-10 * sv[0])
    assert np.linalg.matrix_rank(f_matrix(N, r).entries) == k


# ---------------------------------------------------------------- A and the Laguerre Gram matrix


@pytest.mark.parametrize("r", [0.0, 0.6, 1.5])
def test_a_small_cases(r):
    assert np.allclose(a_matrix(1, r).entries, [[erfc(r)]], rtol=0, atol=1e-14)
    assert a_matrix(2, r)[0, 0] == pytest.approx(2 * q_matrix_closed(2, r)[1, 1], abs=1e-15)


@pytest.mark.parametrize("N", range(1, 13))
@pytest.mark.parametrize("r", [0.0, 0.5, 1.2, 2.4])
def test_a_is_laguerre_gram_up_to_diagonal_similarity(N, r):
    # A inherits the row normalization of Q, so it is symmetric only after
    # conjugation by diag(C_{2j+b-1}); up to signs it is the Laguerre Gram matrix
    ps = parity_split(N)
    c = np.exp([log_c(2 * j + ps.b - 1) for j in range(ps.half)])
    a = a_matrix(N, r).entries
    sym = a * c[None, :] / c[:, None]
    g = laguerre_kernel_matrix(ps.half, 0.5 * (-1) ** N, r * r).entries
    assert np.allclose(sym, sym.T, rtol=0, atol=1e-13)
    assert np.max(np.abs(np.abs(sym) - np.abs(g))) < 1e-12


def test_laguerre_kernel_examples():
    assert laguerre_kernel_matrix(1, -0.5, 0.0)[0, 0] == pytest.approx(1.0, abs=1e-13)
    for x in (0.1, 1.0, 3.0):
        assert laguerre_kernel_matrix(1, -0.5, x)[0, 0] == pytest.approx(erfc(math.sqrt(x)), abs=1e-13)
        want = 1 - (math.erf(math.sqrt(x)) - 2 / math.sqrt(math.pi) * math.sqrt(x) * math.exp(-x))
        assert laguerre_kernel_matrix(1, 0.5, x)[0, 0] == pytest.approx(want, abs=1e-13)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 10), st.floats(0.0, 3.0))
def test_determinant_cyclic_property(N, r):
    # 1e-12 relative to the rounding scale of the products; F has entries up to (4r)^{N-1}
    q, f = q_matrix_closed(N, r), f_matrix(N, r)
    i = np.eye(N)
    d1 = np.linalg.det(i - (q @ f).entries)
    d2 = np.linalg.det(i - (f @ q).entries)
    scale = max(np.max(np.abs(q.entries) @ np.abs(f.entries)), np.max(np.abs(f.entries) @ np.abs(q.entries)))
    assert abs(d1 - d2) <= 1e-12 * max(1.0, scale)
