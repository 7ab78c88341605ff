import numpy as np
import pytest
import sympy

from kfueter.errors import DomainError
from kfueter.operators import build_d0, build_d1, formal_adjoint, symbol_real
from kfueter.symbols import (
    boundary_conditions,
    check_symbol_exactness,
    ellipticity_check,
    expected_normal_conditions,
    numeric_rank,
    orthogonal_projectors,
    zeta,
    zeta_block_det,
)

E0 = (1.0, 0.0, 0.0, 0.0)


def unit(rng):
    v = rng.standard_normal(4)
    return v / np.linalg.norm(v)


def test_numeric_rank_examples():
    assert numeric_rank(np.zeros((3, 3))) == 0
    assert numeric_rank(symbol_real(build_d0(2), [0.2, 0.4, -1, 0.3])) == 3
    for k in range(2, 7):
        assert numeric_rank(symbol_real(build_d1(k), [0, 0.6, 0.8, 0])) == k - 1


def test_exactness_at_e0():
    rep = check_symbol_exactness(2, np.array(E0))
    assert (rep.rank_d0, rep.rank_d1) == (3, 1)
    assert rep.ker_im_gap < 1e-12
    assert set(rep.to_json()) == {"k", "xi", "rank_d0", "rank_d1", "product_norm",
                                  "ker_im_gap", "lambda_min"}


@pytest.mark.parametrize("k", range(2, 9))
def test_exactness_random(k):
    rng = np.random.default_rng(100 + k)
    for _ in range(25):
        rep = check_symbol_exactness(k, unit(rng))
        assert rep.product_norm < 1e-12


def test_exactness_rejects_zero():
    with pytest.raises(DomainError):
        check_symbol_exactness(2, np.zeros(4))


def test_ellipticity_e0():
    # the k = 2 symbol at e0 is diag(2, 1, 1, 2)
    assert ellipticity_check(2, np.array(E0)) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("k", [2, 4, 7])
def test_ellipticity_homogeneity(k):
    rng = np.random.default_rng(k)
    xi = unit(rng)
    assert ellipticity_check(k, 2 * xi) == pytest.approx(4 * ellipticity_check(k, xi), rel=1e-10)


@pytest.mark.parametrize("k", [2, 3, 6])
def test_projectors(k):
    rng = np.random.default_rng(k)
    nu = unit(rng)
    pa, pb = orthogonal_projectors(k, nu)
    eye = np.eye(2 * k)
    for p in (pa, pb):
        np.testing.assert_allclose(p @ p, p, atol=1e-12)
        np.testing.assert_allclose(p, p.conj().T, atol=1e-12)
    np.testing.assert_allclose(pa + pb, eye, atol=1e-12)
    np.testing.assert_allclose(pa @ pb, 0, atol=1e-12)
    assert np.trace(pa).real == pytest.approx(k + 1)
    assert np.trace(pb).real == pytest.approx(k - 1)
    np.testing.assert_allclose(pb @ symbol_real(build_d0(k), nu), 0, atol=1e-12)


def test_pointwise_complex_on_normals():
    rng = np.random.default_rng(5)
    for k in range(2, 9):
        nu = unit(rng)
        np.testing.assert_allclose(
            symbol_real(build_d1(k), nu) @ symbol_real(build_d0(k), nu), 0, atol=1e-13
        )


def test_zeta_det_identity():
    rng = np.random.default_rng(9)
    for _ in range(50):
        nu = rng.standard_normal(4)
        z0, z1 = zeta(nu)
        assert zeta_block_det(nu) == pytest.approx(abs(z0) ** 2 + abs(z1) ** 2, rel=1e-12)


def test_zeta_matches_d0_block():
    nu = np.array([0.3, -0.5, 0.2, 0.9])
    z0, z1 = zeta(nu)
    blk = symbol_real(build_d0(2), nu)[:2, :2]
    np.testing.assert_allclose(blk, [[-np.conj(z1), -np.conj(z0)], [z0, -z1]], atol=1e-15)


def test_boundary_conditions_k2():
    bc = boundary_conditions(2, E0)
    assert bc.rank == 3 and bc.Psi_dirichlet
    assert sorted(bc.describe()) == ["psi0 - psi3 = 0", "psi1 = 0", "psi2 = 0"]


def test_boundary_conditions_k3():
    bc = boundary_conditions(3, E0)
    assert sorted(bc.describe()) == ["psi0 - psi3 = 0", "psi1 = 0", "psi2 - psi5 = 0", "psi4 = 0"]


@pytest.mark.parametrize("k", range(2, 9))
def test_boundary_conditions_general_k(k):
    want = sympy.Matrix(expected_normal_conditions(k).astype(int).tolist()).rref()[0]
    assert boundary_conditions(k, E0).reduced() == want


def test_boundary_rank_random_normal():
    rng = np.random.default_rng(4)
    for k in range(2, 7):
        bc = boundary_conditions(k, unit(rng))
        assert bc.rank == k + 1 and bc.Psi_dirichlet
        np.testing.assert_allclose(bc.rows, symbol_real(formal_adjoint(build_d0(k)), bc.nu))
