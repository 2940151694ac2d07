import math

import numpy as np
import pytest
from scipy.linalg import expm as scipy_expm

from bohm_squeeze import fockalg as fa


@pytest.fixture(scope="module")
def spec24():
    return fa.FockSpaceSpec(24)


@pytest.fixture(scope="module")
def spec40_direct_nu1():
    # shared by the truncation-law and factorization tests (expensive)
    spec = fa.FockSpaceSpec(40)
    return spec, fa.two_mode_squeeze_direct(1.0, spec)


# ---------------------------------------------------------------------------
# ladder operators


def test_minimal_ladder_matrix():
    a, b = fa.build_ladder(fa.FockSpaceSpec(1))
    # A1 is 2x2 with sqrt(1) at (0, 1); a = A1 x I
    expected_a = np.kron(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))
    np.testing.assert_array_equal(a.entries, expected_a)
    expected_b = np.kron(np.eye(2), np.array([[0.0, 1.0], [0.0, 0.0]]))
    np.testing.assert_array_equal(b.entries, expected_b)


def test_vacuum_annihilation():
    spec = fa.FockSpaceSpec(6)
    a, b = fa.build_ladder(spec)
    vac = np.zeros(spec.dim)
    vac[spec.index(0, 0)] = 1.0
    assert np.all(a.entries @ vac == 0.0)
    assert np.all(b.entries @ vac == 0.0)


def test_commutator_is_identity_below_truncation():
    spec = fa.FockSpaceSpec(9)
    a, _ = fa.build_ladder(spec)
    ad = fa.dagger(a)
    comm = a.entries @ ad.entries - ad.entries @ a.entries
    # rows/cols not touching the top single-mode level n_a = 9
    keep = [spec.index(na, nb) for na in range(9) for nb in range(10)]
    np.testing.assert_allclose(comm[np.ix_(keep, keep)], np.eye(len(keep)), atol=1e-13)


def test_modes_commute():
    spec = fa.FockSpaceSpec(5)
    a, b = fa.build_ladder(spec)
    np.testing.assert_array_equal(a.entries @ b.entries, b.entries @ a.entries)


# ---------------------------------------------------------------------------
# matrix exponential


def test_expm_zero_is_identity():
    spec = fa.FockSpaceSpec(3)
    z = fa.FockOperator(spec, np.zeros((spec.dim, spec.dim)))
    np.testing.assert_array_equal(fa.matrix_exponential(z).entries, np.eye(spec.dim))


def test_expm_diagonal():
    spec = fa.FockSpaceSpec(2)
    d = np.linspace(-2.0, 1.5, spec.dim)
    op = fa.FockOperator(spec, np.diag(d))
    np.testing.assert_allclose(fa.matrix_exponential(op).entries, np.diag(np.exp(d)), rtol=1e-13)


def test_expm_inverse_property():
    rng = np.random.default_rng(3)
    spec = fa.FockSpaceSpec(3)
    m = rng.normal(size=(spec.dim, spec.dim)) + 1j * rng.normal(size=(spec.dim, spec.dim))
    m *= 0.5
    forward = fa.matrix_exponential(fa.FockOperator(spec, m)).entries
    backward = fa.matrix_exponential(fa.FockOperator(spec, -m)).entries
    np.testing.assert_allclose(forward @ backward, np.eye(spec.dim), atol=1e-10)


def test_expm_matches_scipy_oracle():
    rng = np.random.default_rng(5)
    for scale in [0.1, 2.0, 40.0]:
        m = scale * (rng.normal(size=(30, 30)) + 1j * rng.normal(size=(30, 30))) / math.sqrt(30)
        ours = fa._expm_array(m)
        ref = scipy_expm(m)
        np.testing.assert_allclose(ours, ref, rtol=1e-10, atol=1e-10 * np.abs(ref).max())


def test_expm_convergence_failure():
    spec = fa.FockSpaceSpec(1)
    huge = fa.FockOperator(spec, np.full((4, 4), 1e60))
    with pytest.raises(fa.ConvergenceError, match="1-norm"):
        fa.matrix_exponential(huge)


def test_expm_rejects_nonfinite():
    spec = fa.FockSpaceSpec(1)
    bad = fa.FockOperator(spec, np.full((4, 4), np.nan))
    with pytest.raises(ValueError):
        fa.matrix_exponential(bad)


# ---------------------------------------------------------------------------
# two-mode squeeze, direct


def test_direct_zero_squeeze_is_identity(spec24):
    op = fa.two_mode_squeeze_direct(0.0, spec24)
    np.testing.assert_allclose(op.entries, np.eye(spec24.dim), atol=1e-15)


def test_direct_vacuum_column_matches_pair_law(spec40_direct_nu1):
    # <n,n|U|0,0> = tanh(nu)^n / cosh(nu) well below the truncation edge
    spec, direct = spec40_direct_nu1
    col = fa.vacuum_column(direct)
    ns = np.arange(13)
    expected = np.tanh(1.0) ** ns / np.cosh(1.0)
    assert np.abs(col[ns, ns] - expected).max() < 1e-10


def test_direct_vacuum_column_pair_structure(spec40_direct_nu1):
    # the generator creates and destroys pairs only, so <m,n|U|0,0> = 0
    # for m != n (exactly, by the preserved mode-number difference)
    spec, direct = spec40_direct_nu1
    col = fa.vacuum_column(direct).copy()
    np.fill_diagonal(col, 0.0)
    assert np.abs(col).max() < 1e-10


def test_direct_is_orthogonal_on_interior(spec24):
    op = fa.two_mode_squeeze_direct(0.5, spec24)
    prod = op.entries.T @ op.entries
    interior = fa.interior_block(fa.FockOperator(spec24, prod), 12)
    np.testing.assert_allclose(interior, np.eye(13 * 13), atol=1e-8)


# ---------------------------------------------------------------------------
# factored form


def test_factored_zero_squeeze_is_identity(spec24):
    op = fa.two_mode_squeeze_factored(0.0, spec24)
    np.testing.assert_allclose(op.entries, np.eye(spec24.dim), atol=1e-15)


def test_factored_interior_block_is_truncation_independent():
    # raising/lowering paths that start and end at levels <= k never touch
    # the truncation edge, so the interior block must not depend on n_max
    f24 = fa.two_mode_squeeze_factored(1.0, fa.FockSpaceSpec(24))
    f32 = fa.two_mode_squeeze_factored(1.0, fa.FockSpaceSpec(32))
    b24 = fa.interior_block(f24, 12)
    b32 = fa.interior_block(f32, 12)
    assert np.abs(b24 - b32).max() < 1e-11


def test_factored_matches_direct_where_truncation_converged(spec40_direct_nu1):
    # with the interior well below the occupation reached by the squeeze,
    # both routes agree to stencil-free precision; this is the operator
    # identity itself (the fixed-truncation distance at deeper interiors is
    # reflection error of the direct route, not an identity violation)
    spec, direct = spec40_direct_nu1
    factored = fa.two_mode_squeeze_factored(1.0, spec)
    d = fa.interior_block(direct, 4)
    f = fa.interior_block(factored, 4)
    assert np.linalg.norm(d - f) / np.linalg.norm(d) < 1e-9

    spec40 = spec
    direct_half = fa.two_mode_squeeze_direct(0.5, spec40)
    factored_half = fa.two_mode_squeeze_factored(0.5, spec40)
    d = fa.interior_block(direct_half, 10)
    f = fa.interior_block(factored_half, 10)
    assert np.linalg.norm(d - f) / np.linalg.norm(d) < 1e-9


def test_factored_vacuum_column_matches_pair_law(spec24):
    factored = fa.two_mode_squeeze_factored(0.75, spec24)
    col = fa.vacuum_column(factored)
    ns = np.arange(13)
    expected = np.tanh(0.75) ** ns / np.cosh(0.75)
    assert np.abs(col[ns, ns] - expected).max() < 1e-12


def test_fixed_truncation_distance_grows_with_squeeze(spec24):
    # documents the reflection-error law at fixed n_max = 24, interior 12:
    # negligible at nu = 0.1, catastrophic by nu = 1
    distances = {}
    for nu in [0.1, 0.5, 1.0]:
        d = fa.interior_block(fa.two_mode_squeeze_direct(nu, spec24), 12)
        f = fa.interior_block(fa.two_mode_squeeze_factored(nu, spec24), 12)
        distances[nu] = np.linalg.norm(d - f) / np.linalg.norm(d)
    assert distances[0.1] < 1e-8
    assert distances[0.5] > 1e-5
    assert distances[1.0] > 1e-2


# ---------------------------------------------------------------------------
# factorization-function system


def test_ode_initial_conditions():
    f = fa.disentangle_ode_oracle(0.0, steps=100)
    assert (f.f1, f.f2, f.f3) == (0.0, 0.0, 0.0)


def test_ode_matches_closed_forms():
    f = fa.disentangle_ode_oracle(1.0, steps=1000)
    assert f.f1 == pytest.approx(math.tanh(1.0), abs=1e-9)
    assert f.f2 == pytest.approx(-math.log(math.cosh(1.0)), abs=1e-9)
    assert f.f3 == pytest.approx(-math.tanh(1.0), abs=1e-9)


def test_ode_antisymmetry_of_f1_f3():
    for nu_end in [0.25, 0.5, 1.5]:
        f = fa.disentangle_ode_oracle(nu_end, steps=800)
        assert f.f1 == pytest.approx(-f.f3, abs=1e-11)


def test_ode_negative_direction():
    f = fa.disentangle_ode_oracle(-0.8, steps=500)
    assert f.f1 == pytest.approx(math.tanh(-0.8), abs=1e-9)
    assert f.f2 == pytest.approx(-math.log(math.cosh(0.8)), abs=1e-9)


def test_ode_step_count_validation():
    with pytest.raises(ValueError, match="100"):
        fa.disentangle_ode_oracle(1.0, steps=50)


def test_ode_step_size_failure():
    # 100 coarse steps over a long interval cannot hold a 1e-14 local bound
    with pytest.raises(fa.ConvergenceError, match="local error"):
        fa.disentangle_ode_oracle(2.0, steps=100, local_tol=1e-14)


# ---------------------------------------------------------------------------
# spec guards


def test_dimension_cap():
    with pytest.raises(ValueError, match="exceeds"):
        fa.FockSpaceSpec(64)
    assert fa.FockSpaceSpec(63).dim == 4096


def test_interior_level_bound(spec24):
    op = fa.two_mode_squeeze_direct(0.1, spec24)
    with pytest.raises(ValueError, match="interior"):
        fa.interior_block(op, 30)
