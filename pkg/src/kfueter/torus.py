"""Exact constant-coefficient solves on the periodic 4-torus.

Every operator acts on a Fourier mode ``exp(i n.x)`` by multiplication with
its symbol at ``i n``, so the Hodge-type splitting, the solution operator of
``box1`` and the right inverses of ``D0`` and ``D1`` are computed mode by
mode.  Only the zero mode is harmonic: for ``n != 0`` the symbol of ``box1``
is positive definite.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .conventions import check_k
from .errors import (
    CompatibilityError,
    EllipticityViolation,
    MeanModeError,
    OrthogonalityError,
    ShapeError,
)
from .grids import Field, TorusGrid  # noqa: F401
from .operators import build_d0, build_d1

_AXES = (0, 1, 2, 3)


# ------------------------------------------------------------- mode symbols


@lru_cache(maxsize=32)
def _mode_symbols(k, grid):
    d0, d1 = build_d0(k), build_d1(k)
    modes = grid.mode_vectors()
    s0 = np.einsum("ijm,...m->...ij", d0.coeffs, 1j * modes)
    s1 = np.einsum("ijm,...m->...ij", d1.coeffs, 1j * modes)
    return s0, s1


def mode_symbol(op, grid):
    """Symbol of ``op`` at every mode, shape ``grid.shape + op.shape``."""
    modes = 1j * grid.mode_vectors()
    if op.order == 1:
        return np.einsum("ijm,...m->...ij", op.coeffs, modes)
    return np.einsum("ijmn,...m,...n->...ij", op.coeffs, modes, modes)


def _fft(values):
    return np.fft.fftn(values, axes=_AXES)


def _ifft(values):
    return np.fft.ifftn(values, axes=_AXES)


def _matvec(mats, vecs):
    return np.einsum("...ij,...j->...i", mats, vecs)


def _herm(mats):
    return np.conj(np.swapaxes(mats, -1, -2))


def apply_op(op, f):
    """Apply a constant-coefficient operator to a torus field spectrally."""
    if op.cols != f.m:
        raise ShapeError(f"operator has {op.cols} columns, field has {f.m} components")
    sym = mode_symbol(op, f.grid)
    return f.with_values(_ifft(_matvec(sym, _fft(f.values))))


@dataclass
class HodgeResult:
    exact_part: Field
    coexact_part: Field
    harmonic_part: Field

    def parts(self):
        return self.exact_part, self.coexact_part, self.harmonic_part

    def reconstruction_error(self, f):
        total = self.exact_part.values + self.coexact_part.values + self.harmonic_part.values
        return float(np.linalg.norm(total - f.values))

    def gram(self):
        """Matrix of inner products between the three parts."""
        p = self.parts()
        return np.array([[a.inner(b) for b in p] for a in p])


def _box1_solve(k, grid, fhat):
    """``S(n)^{-1} fhat(n)`` for ``n != 0``, zero at ``n = 0``.

    ``S(n) = S0 S0^H + S1^H S1`` is the symbol of ``box1`` at ``i n``.
    """
    s0, s1 = _mode_symbols(k, grid)
    s = s0 @ _herm(s0) + _herm(s1) @ s1
    flat_s = s.reshape(-1, 2 * k, 2 * k)[1:]
    flat_f = fhat.reshape(-1, 2 * k)[1:]
    lam = np.linalg.eigvalsh(flat_s)[:, 0]
    if np.any(lam <= 0):
        raise EllipticityViolation("box1 symbol singular at a nonzero mode")
    x = np.zeros_like(fhat).reshape(-1, 2 * k)
    x[1:] = np.linalg.solve(flat_s, flat_f[..., None])[..., 0]
    return x.reshape(fhat.shape), s0, s1


def hodge_decompose(k, f):
    """Split ``f`` into exact, coexact and harmonic parts, mode by mode."""
    k = check_k(k)
    if f.m != 2 * k:
        raise ShapeError(f"expected {2 * k} components, got {f.m}")
    fhat = _fft(f.values)
    x, s0, s1 = _box1_solve(k, f.grid, fhat)
    exact = _matvec(s0, _matvec(_herm(s0), x))
    coexact = _matvec(_herm(s1), _matvec(s1, x))
    harmonic = np.zeros_like(fhat)
    harmonic[0, 0, 0, 0] = fhat[0, 0, 0, 0]
    return HodgeResult(
        exact_part=f.with_values(_ifft(exact)),
        coexact_part=f.with_values(_ifft(coexact)),
        harmonic_part=f.with_values(_ifft(harmonic)),
    )


def box1_inverse(k, f):
    """``N1 f``: the solution of ``box1 u = f - P f`` orthogonal to constants."""
    k = check_k(k)
    x, _, _ = _box1_solve(k, f.grid, _fft(f.values))
    return f.with_values(_ifft(x))


def solve_d0_torus(k, f, tol=1e-10):
    """``u = D0* N1 f``; a solution of ``D0 u = f`` for compatible, mean-zero ``f``.

    Raises
    ------
    CompatibilityError
        If ``|D1 f| > tol |f|``.
    OrthogonalityError
        If the harmonic (zero-mode) part of ``f`` exceeds ``tol |f|``.
    """
    k = check_k(k)
    if f.m != 2 * k:
        raise ShapeError(f"expected {2 * k} components, got {f.m}")
    norm = f.norm()
    if norm == 0:
        return Field(f.grid, np.zeros(f.values.shape[:4] + (k + 1,), dtype=complex))
    compat = apply_op(build_d1(k), f).norm() / norm
    if compat > tol:
        raise CompatibilityError(f"|D1 f| / |f| = {compat:.3e} exceeds {tol:g}", compat)
    harmonic = np.linalg.norm(f.mean()) * np.sqrt(f.values[..., 0].size) / norm
    if harmonic > tol:
        raise OrthogonalityError(
            f"harmonic part |P f| / |f| = {harmonic:.3e} exceeds {tol:g}", harmonic
        )
    fhat = _fft(f.values)
    x, s0, _ = _box1_solve(k, f.grid, fhat)
    return Field(f.grid, _ifft(_matvec(_herm(s0), x)))


def d1_mode_gram(k, grid):
    """``S1 S1^H`` at every mode (equals ``2 |n|^2 I``)."""
    _, s1 = _mode_symbols(check_k(k), grid)
    return s1 @ _herm(s1)


def solve_d1_torus(k, Psi, tol=1e-10):
    """``psi = D1* N2 Psi`` with ``N2`` inverting ``box2 = -2 Delta`` on mean-zero data."""
    k = check_k(k)
    if Psi.m != k - 1:
        raise ShapeError(f"expected {k - 1} components, got {Psi.m}")
    norm = Psi.norm()
    if norm == 0:
        return Field(Psi.grid, np.zeros(Psi.values.shape[:4] + (2 * k,), dtype=complex))
    mean = np.linalg.norm(Psi.mean()) * np.sqrt(Psi.values[..., 0].size) / norm
    if mean > tol:
        raise MeanModeError(f"Psi has a mean component of relative size {mean:.3e}")
    _, s1 = _mode_symbols(k, Psi.grid)
    modes = Psi.grid.mode_vectors()
    sq = 2 * np.sum(modes**2, axis=-1)
    sq[0, 0, 0, 0] = 1.0
    phat = _fft(Psi.values) / sq[..., None]
    phat[0, 0, 0, 0] = 0
    return Field(Psi.grid, _ifft(_matvec(_herm(s1), phat)))


def harmonic_space_torus(k, grid):
    """Orthonormal basis of the harmonic fields: the ``2k`` constant fields."""
    k = check_k(k)
    scale = 1 / np.sqrt(grid.n**4)
    return [Field.constant(grid, scale * e) for e in np.eye(2 * k)]
