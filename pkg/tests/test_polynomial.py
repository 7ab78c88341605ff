import json

import numpy as np
import pytest

from kfueter.errors import CompatibilityError, ShapeError
from kfueter.operators import build_d0, build_d1
from kfueter.polynomial import (
    PolyField,
    apply_poly,
    degree_matrix,
    exactness_dimensions,
    homogeneous_monomials,
    solve_d0_poly,
)


def test_monomial_counts():
    # C(d + 3, 3)
    assert [len(homogeneous_monomials(d)) for d in range(5)] == [1, 4, 10, 20, 35]
    assert homogeneous_monomials(-1) == ()


def test_apply_d0_to_x0():
    phi = PolyField(3, 1, [{(1, 0, 0, 0): 1}, {}, {}])
    psi = apply_poly(build_d0(2), phi)
    # dz0 x0 = 1 lands in row 1; -dz1bar x0 = 0 in row 0
    np.testing.assert_array_equal(psi.homogeneous_part(0), [0, 1, 0, 0])
    assert apply_poly(build_d1(2), psi).norm() == 0


def test_constants_are_annihilated():
    phi = PolyField(3, 0, [{(0, 0, 0, 0): 2 + 1j}, {(0, 0, 0, 0): 1}, {}])
    assert apply_poly(build_d0(2), phi).norm() == 0


def test_shape_mismatch():
    with pytest.raises(ShapeError):
        apply_poly(build_d0(2), PolyField(2, 1))


def test_degree_bound_enforced():
    with pytest.raises(ValueError):
        PolyField(1, 1, [{(2, 0, 0, 0): 1.0}])


def test_solve_zero():
    phi = solve_d0_poly(2, PolyField(4, 2))
    assert phi.norm() == 0


def test_solve_unit_vector():
    psi = PolyField(4, 0, [{}, {(0, 0, 0, 0): 1}, {}, {}])
    phi = solve_d0_poly(2, psi)
    assert (apply_poly(build_d0(2), phi) - psi).norm() < 1e-12


def test_incompatible_rhs():
    # D1 of a linear field in component 0 is a nonzero constant
    psi = PolyField(4, 1, [{(1, 0, 0, 0): 1}, {}, {}, {}])
    with pytest.raises(CompatibilityError):
        solve_d0_poly(2, psi)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_round_trip_random(k):
    rng = np.random.default_rng(k)
    d0 = build_d0(k)
    phi0 = PolyField.random(k + 1, 3, rng)
    psi = apply_poly(d0, phi0)
    phi = solve_d0_poly(k, psi)
    assert (apply_poly(d0, phi) - psi).norm() < 1e-10
    assert phi.degree <= psi.degree + 1


def test_minimum_norm_solution_is_orthogonal_to_kernel():
    rng = np.random.default_rng(7)
    psi = apply_poly(build_d0(2), PolyField.random(3, 2, rng))
    phi = solve_d0_poly(2, psi)
    mat = degree_matrix(build_d0(2), 2)
    _, s, vh = np.linalg.svd(mat)
    null = vh[np.sum(s > 1e-10 * s[0]):].conj().T
    assert np.linalg.norm(null.conj().T @ phi.homogeneous_part(2)) < 1e-10


# dim ker D1 on degree-d fields, computed once and frozen.
KNOWN_DIMS = {2: [4, 15, 36, 70]}


@pytest.mark.parametrize("k", [2, 3, 4, 5])
@pytest.mark.parametrize("d", [0, 1, 2, 3])
def test_exactness_dimensions(k, d):
    dims = exactness_dimensions(k, d)
    assert dims["dim_ker_d1"] == dims["rank_d0"]
    assert dims["product_norm"] == 0
    if k in KNOWN_DIMS:
        assert dims["dim_ker_d1"] == KNOWN_DIMS[k][d]


def test_degree_matrix_against_apply():
    rng = np.random.default_rng(1)
    d0 = build_d0(3)
    phi = PolyField(4, 2)
    vec = rng.standard_normal(4 * 10) + 1j * rng.standard_normal(4 * 10)
    phi.set_homogeneous_part(2, vec)
    np.testing.assert_allclose(
        degree_matrix(d0, 2) @ vec, apply_poly(d0, phi).homogeneous_part(1), atol=1e-12
    )


def test_json_round_trip_and_eval():
    rng = np.random.default_rng(2)
    p = PolyField.random(2, 2, rng)
    q = PolyField.from_json(json.dumps(p.to_json()))
    x = np.array([0.1, -0.4, 1.3, 0.7])
    np.testing.assert_allclose(p(x), q(x))
    term = p.to_json()["components"][0][0]
    assert set(term) == {"monomial", "re", "im"}
