"""Constant-coefficient matrix differential operators on R^4.

A :class:`FirstOrderOperator` stores, for each matrix entry, the coefficient
vector ``(c0, .., c3)`` of ``sum_m c_m d/dx_m``.  A
:class:`SecondOrderOperator` stores a symmetric 4x4 tensor ``Q`` per entry,
read as ``sum_{m,n} Q[m, n] d/dx_m d/dx_n``.

All operators built here have Gaussian-integer (or half-integer, after
symmetrisation) coefficients, which float64 represents exactly, so equality
tests use ``==`` rather than a tolerance.
"""
import json

import numpy as np

from .conventions import (
    DZ0,
    DZ0BAR,
    DZ1,
    DZ1BAR,
    NABLA,
    X_IN_Z,
    Z_NAMES,
    check_k,
    flat_index_psi,
    laplacian_tensor,
    product_tensor,
)
from .errors import ShapeError

__all__ = [
    "FirstOrderOperator",
    "SecondOrderOperator",
    "build_d0",
    "build_d1",
    "formal_adjoint",
    "compose",
    "box0",
    "box1",
    "box1_closed_form",
    "box2",
    "laplacian_parts",
    "symbol_real",
    "symbol_fourier",
    "symbol_line",
    "format_operator",
    "operator_to_json",
    "operator_from_json",
]


class _OperatorMatrix:
    """Shared behaviour of the first- and second-order operator matrices."""

    order = 0
    _tail = ()

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 2 + len(self._tail) or c.shape[2:] != self._tail:
            raise ShapeError(
                f"expected (rows, cols, {', '.join(map(str, self._tail))}) "
                f"coefficients, got {c.shape}"
            )
        c = self._normalise(c)
        c.setflags(write=False)
        self.coeffs = c

    @staticmethod
    def _normalise(c):
        return c

    @property
    def shape(self):
        return self.coeffs.shape[:2]

    @property
    def rows(self):
        return self.coeffs.shape[0]

    @property
    def cols(self):
        return self.coeffs.shape[1]

    def entry(self, i, j):
        return self.coeffs[i, j].copy()

    def is_zero(self):
        return not np.any(self.coeffs)

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and self.coeffs.shape == other.coeffs.shape
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __hash__(self):
        return hash((type(self).__name__, self.coeffs.shape, self.coeffs.tobytes()))

    def __neg__(self):
        return type(self)(-self.coeffs)

    def __add__(self, other):
        _check_same(self, other)
        return type(self)(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return type(self)(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(rows={self.rows}, cols={self.cols})"


class FirstOrderOperator(_OperatorMatrix):
    """Matrix of homogeneous first-order symbols, ``coeffs.shape == (rows, cols, 4)``."""

    order = 1
    _tail = (4,)


class SecondOrderOperator(_OperatorMatrix):
    """Matrix of homogeneous second-order symbols, ``coeffs.shape == (rows, cols, 4, 4)``."""

    order = 2
    _tail = (4, 4)

    @staticmethod
    def _normalise(c):
        return 0.5 * (c + c.swapaxes(2, 3))

    def monomials(self, i, j):
        """Entry ``(i, j)`` as ``{(m, n): coefficient}`` over ``m <= n``.

        Ten numbers per entry; off-diagonal pairs carry ``2 Q[m, n]``.
        """
        q = self.coeffs[i, j]
        out = {}
        for m in range(4):
            for n in range(m, 4):
                out[(m, n)] = q[m, m] if m == n else 2 * q[m, n]
        return out


def _check_same(a, b):
    if type(a) is not type(b) or a.coeffs.shape != b.coeffs.shape:
        raise ShapeError(f"cannot combine {a!r} with {b!r}")


def build_d0(k):
    """The k-Cauchy-Fueter operator as a ``2k x (k+1)`` matrix.

    Row ``(A, j)`` (flat ``2j + A``) is ``nabla_A^{0'} phi_j + nabla_A^{1'} phi_{j+1}``.
    """
    k = check_k(k)
    c = np.zeros((2 * k, k + 1, 4), dtype=complex)
    for j in range(k):
        for A in (0, 1):
            row = flat_index_psi(A, j, k)
            c[row, j] = NABLA[A, 0]
            c[row, j + 1] = NABLA[A, 1]
    return FirstOrderOperator(c)


def build_d1(k):
    """The compatibility operator, a ``(k-1) x 2k`` banded matrix."""
    k = check_k(k)
    c = np.zeros((k - 1, 2 * k, 4), dtype=complex)
    for j in range(k - 1):
        c[j, flat_index_psi(0, j, k)] = -NABLA[1, 0]
        c[j, flat_index_psi(1, j, k)] = NABLA[0, 0]
        c[j, flat_index_psi(0, j + 1, k)] = -NABLA[1, 1]
        c[j, flat_index_psi(1, j + 1, k)] = NABLA[0, 1]
    return FirstOrderOperator(c)


def formal_adjoint(op):
    """Formal adjoint ``(-1)^order * conj(op)^T``."""
    sign = -1 if op.order == 1 else 1
    c = np.conj(op.coeffs).swapaxes(0, 1)
    return type(op)(sign * c)


def compose(a, b):
    """Product ``a b`` of two first-order operators (coefficients commute)."""
    if a.order != 1 or b.order != 1:
        raise ShapeError("compose expects two first-order operators")
    if a.cols != b.rows:
        raise ShapeError(f"cannot compose {a.shape} with {b.shape}")
    q = np.einsum("ilm,ljn->ijmn", a.coeffs, b.coeffs)
    return SecondOrderOperator(q)


def box0(k):
    d0 = build_d0(k)
    return compose(formal_adjoint(d0), d0)


def box1(k):
    """Associated Laplacian ``D0 D0* + D1* D1`` on the middle space."""
    d0, d1 = build_d0(k), build_d1(k)
    return compose(d0, formal_adjoint(d0)) + compose(formal_adjoint(d1), d1)


def box2(k):
    d1 = build_d1(k)
    return compose(d1, formal_adjoint(d1))


def laplacian_parts():
    """Coefficient tensors of ``Delta, Delta_1, Delta_2, L`` and ``conj(L)``.

    ``L`` is ``dz0bar dz1bar = (dx0 + i dx1)(dx2 + i dx3)``, the operator the
    composition ``D0 D0* + D1* D1`` produces in the upper off-diagonal slot.
    """
    lap = laplacian_tensor()
    lap1 = product_tensor(DZ0, DZ0BAR)
    lap2 = product_tensor(DZ1, DZ1BAR)
    ell = product_tensor(DZ0BAR, DZ1BAR)
    ell_bar = product_tensor(DZ0, DZ1)
    return {"Delta": lap, "Delta1": lap1, "Delta2": lap2, "L": ell, "Lbar": ell_bar}


def box1_closed_form(k):
    """Block-diagonal closed form of :func:`box1`, built without composing."""
    k = check_k(k)
    p = laplacian_parts()
    lap, lap1, lap2, ell, ell_bar = p["Delta"], p["Delta1"], p["Delta2"], p["L"], p["Lbar"]
    n = 2 * k
    c = np.zeros((n, n, 4, 4), dtype=complex)
    c[0, 0] = lap + lap1
    c[0, 1] = ell
    c[1, 0] = ell_bar
    c[1, 1] = lap + lap2
    for i in range(2, n - 2):
        c[i, i] = 2 * lap
    c[n - 2, n - 2] = lap + lap2
    c[n - 2, n - 1] = -ell
    c[n - 1, n - 2] = -ell_bar
    c[n - 1, n - 1] = lap + lap1
    return SecondOrderOperator(-c)


def _evaluate(op, v):
    v = np.asarray(v)
    if v.shape != (4,):
        raise ShapeError(f"expected a 4-vector, got shape {v.shape}")
    if op.order == 1:
        return op.coeffs @ v
    return np.einsum("ijmn,m,n->ij", op.coeffs, v, v)


def symbol_real(op, v):
    """Substitute ``d/dx_m -> v_m``."""
    return _evaluate(op, np.asarray(v, dtype=float))


def symbol_fourier(op, n):
    """Substitute ``d/dx_m -> i n_m``; the action on the mode ``exp(i n.x)``."""
    return _evaluate(op, 1j * np.asarray(n, dtype=float))


def symbol_line(op2, xi, nu):
    """Quadratic pencil ``(A0, A1, A2)`` of ``op2(i xi + nu * lam)``.

    ``op2(i xi + nu lam) = A0 + lam A1 + lam^2 A2``.
    """
    if op2.order != 2:
        raise ShapeError("symbol_line expects a second-order operator")
    xi = np.asarray(xi, dtype=float)
    nu = np.asarray(nu, dtype=float)
    q = op2.coeffs
    a0 = -np.einsum("ijmn,m,n->ij", q, xi, xi)
    a1 = 2j * np.einsum("ijmn,m,n->ij", q, xi, nu)
    a2 = np.einsum("ijmn,m,n->ij", q, nu, nu)
    return a0, a1, a2


# ---------------------------------------------------------------- printing


def _fmt_coeff(c, first):
    """Render a Gaussian-rational coefficient as a signed prefix."""
    c = complex(c)
    re, im = c.real, c.imag

    def num(x):
        return str(int(x)) if float(x).is_integer() else f"{x:g}"

    if im == 0:
        mag = abs(re)
        sign = "−" if re < 0 else "+"
        body = "" if mag == 1 else num(mag)
    elif re == 0:
        mag = abs(im)
        sign = "−" if im < 0 else "+"
        body = "i" if mag == 1 else num(mag) + "i"
    else:
        sign = "+"
        body = f"({num(re)}{'+' if im > 0 else '−'}{num(abs(im))}i)"
    if first:
        return ("−" if sign == "−" else "") + body
    return f" {sign} " + body


def _fmt_poly(terms):
    terms = [(c, name) for c, name in terms if c != 0]
    if not terms:
        return "0"
    out = []
    for idx, (c, name) in enumerate(terms):
        out.append(_fmt_coeff(c, idx == 0) + name)
    return "".join(out)


def _x_names():
    return [f"∂x{m}" for m in range(4)]


def format_entry(op, i, j, basis="z"):
    """Human-readable entry, e.g. ``−∂z̄1`` or ``−∂x2 − i∂x3``."""
    c = op.coeffs[i, j]
    if op.order == 1:
        if basis == "x":
            return _fmt_poly(zip(c, _x_names()))
        w = X_IN_Z.T @ c
        return _fmt_poly(zip(np.round(w, 12), Z_NAMES))
    if basis == "x":
        names, q = _x_names(), c
    else:
        names, q = Z_NAMES, X_IN_Z.T @ c @ X_IN_Z
        q = np.round(q, 12)
    terms = []
    for m in range(4):
        for n in range(m, 4):
            coef = q[m, m] if m == n else 2 * q[m, n]
            name = names[m] + names[n] if m != n else names[m] + "²"
            terms.append((coef, name))
    return _fmt_poly(terms)


def format_operator(op, basis="z"):
    """One parenthesised row per line."""
    lines = []
    for i in range(op.rows):
        cells = [format_entry(op, i, j, basis) for j in range(op.cols)]
        lines.append("(" + ", ".join(cells) + ")")
    return "\n".join(lines)


def operator_to_json(op):
    """JSON-compatible dict with every coefficient stored as ``[re, im]``."""
    c = op.coeffs
    return {
        "order": op.order,
        "rows": op.rows,
        "cols": op.cols,
        "coeffs": np.stack([c.real, c.imag], axis=-1).tolist(),
    }


def operator_from_json(data):
    if isinstance(data, str):
        data = json.loads(data)
    arr = np.asarray(data["coeffs"], dtype=float)
    c = arr[..., 0] + 1j * arr[..., 1]
    cls = FirstOrderOperator if data["order"] == 1 else SecondOrderOperator
    op = cls(c)
    if op.shape != (data["rows"], data["cols"]):
        raise ShapeError("declared shape does not match coefficient array")
    return op


DZ = {"dz0": DZ0, "dz0bar": DZ0BAR, "dz1": DZ1, "dz1bar": DZ1BAR}
