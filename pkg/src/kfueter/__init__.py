"""The k-Cauchy-Fueter complex on R^4.

Exact constant-coefficient operator matrices for ``D0``, ``D1`` and their
Laplacians, pointwise symbol analysis, the Shapiro-Lopatinskii check for the
natural boundary problem, and numerical solvers on the periodic torus and on
a discrete box grid.
"""
from .conventions import ComponentLayout, flat_index_psi, unflat_index_psi
from .errors import (
    CompatibilityError,
    DomainError,
    EllipticityViolation,
    ExactnessViolation,
    KFueterError,
    OrthogonalityError,
    SolverError,
    TheoryViolation,
)
from .grids import BoxGrid, Field, TorusGrid
from .lopatinskii import SLInstance, sl_direct_check, sl_reduced_nonsingular
from .operators import (
    FirstOrderOperator,
    SecondOrderOperator,
    box0,
    box1,
    box1_closed_form,
    box2,
    build_d0,
    build_d1,
    compose,
    formal_adjoint,
    symbol_fourier,
    symbol_line,
    symbol_real,
)

__version__ = "0.1.0"
