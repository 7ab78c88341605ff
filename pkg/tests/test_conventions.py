import numpy as np
import pytest
from hypothesis import given, strategies as st

from kfueter.conventions import (
    DZ0,
    DZ0BAR,
    DZ1,
    DZ1BAR,
    NABLA,
    ComponentLayout,
    check_k,
    flat_index_psi,
    laplacian_tensor,
    product_tensor,
    unflat_index_psi,
)
from kfueter.errors import DomainError, IndexRangeError


def test_z_derivative_vectors():
    np.testing.assert_array_equal(DZ0, [1, -1j, 0, 0])
    np.testing.assert_array_equal(DZ0BAR, [1, 1j, 0, 0])
    np.testing.assert_array_equal(DZ1, [0, 0, 1, -1j])
    np.testing.assert_array_equal(DZ1BAR, [0, 0, 1, 1j])


def test_laplacian_from_z_products():
    # dz0 dz0bar + dz1 dz1bar = dx0^2 + .. + dx3^2 without the usual factor 1/4
    lap = product_tensor(DZ0, DZ0BAR) + product_tensor(DZ1, DZ1BAR)
    np.testing.assert_array_equal(lap, laplacian_tensor())


def test_raised_gradient():
    np.testing.assert_array_equal(NABLA[0, 0], -DZ1BAR)
    np.testing.assert_array_equal(NABLA[0, 1], -DZ0BAR)
    np.testing.assert_array_equal(NABLA[1, 0], DZ0)
    np.testing.assert_array_equal(NABLA[1, 1], -DZ1)


def test_layout_counts():
    lay = ComponentLayout(5)
    assert (lay.n_phi, lay.n_psi, lay.n_Psi) == (6, 10, 4)
    assert lay.n_phi + lay.n_Psi == lay.n_psi


@pytest.mark.parametrize("bad", [1, 0, -3, 2.5])
def test_layout_rejects_small_k(bad):
    with pytest.raises(DomainError):
        ComponentLayout(bad)


def test_flat_index_examples():
    assert flat_index_psi(0, 0, 2) == 0
    assert flat_index_psi(1, 1, 3) == 3
    for k in range(2, 7):
        assert flat_index_psi(1, k - 1, k) == 2 * k - 1


@pytest.mark.parametrize("A,j,k", [(2, 0, 2), (-1, 0, 3), (0, 2, 2), (1, -1, 4)])
def test_flat_index_out_of_range(A, j, k):
    with pytest.raises(IndexRangeError):
        flat_index_psi(A, j, k)


@given(st.integers(2, 40))
def test_flat_index_is_bijection(k):
    image = sorted(flat_index_psi(A, j, k) for A in (0, 1) for j in range(k))
    assert image == list(range(2 * k))
    for i in range(2 * k):
        assert flat_index_psi(*unflat_index_psi(i, k), k) == i


def test_check_k_returns_int():
    assert check_k(np.int64(4)) == 4
