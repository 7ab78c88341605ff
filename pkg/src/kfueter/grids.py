"""Grids and sampled multi-component fields.

:class:`TorusGrid` carries the periodic spectral solver; :class:`BoxGrid`
carries the shifted-grid finite-difference complex, whose three levels have
``n+1``, ``n`` and ``n-1`` points per dimension.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError


@dataclass(frozen=True)
class TorusGrid:
    """``n`` points per dimension on the torus ``[0, period)^4``."""

    n: int
    period: float = 2 * np.pi

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise DomainError(f"n must be even and >= 4, got {self.n}")
        if not self.period > 0:
            raise DomainError("period must be positive")

    kind = "torus"

    @property
    def shape(self):
        return (self.n,) * 4

    @property
    def spacing(self):
        return self.period / self.n

    def frequencies(self):
        """Angular frequencies ``2 pi m / L`` with ``m`` in ``[-n/2, n/2)``, FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.period / self.n)

    def mode_vectors(self):
        """Array of shape ``(n, n, n, n, 4)`` holding the frequency of each mode."""
        f = self.frequencies()
        return np.stack(np.meshgrid(f, f, f, f, indexing="ij"), axis=-1)

    def points(self):
        x = np.arange(self.n) * self.spacing
        return np.stack(np.meshgrid(x, x, x, x, indexing="ij"), axis=-1)

    def to_json(self):
        return {"type": "torus", "n": self.n, "period": self.period}


@dataclass(frozen=True, eq=False)
class Field:
    """Complex ``m``-component samples on a grid; ``values.shape == grid.shape + (m,)``."""

    grid: object
    values: np.ndarray
    level: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        shape = _level_shape(self.grid, self.level)
        if v.ndim != 5 or v.shape[:4] != shape:
            raise ShapeError(f"expected values of shape {shape} + (m,), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def m(self):
        return self.values.shape[-1]

    def norm(self):
        return float(np.linalg.norm(self.values))

    def inner(self, other):
        """``sum <self, other>`` with the Hermitian product linear in ``self``."""
        return complex(np.vdot(other.values, self.values))

    def mean(self):
        return self.values.reshape(-1, self.m).mean(axis=0)

    def with_values(self, values):
        return Field(self.grid, values, self.level)

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)

    @classmethod
    def random(cls, grid, m, rng, level=0, mean_zero=False):
        shape = _level_shape(grid, level) + (m,)
        v = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        if mean_zero:
            v -= v.reshape(-1, m).mean(axis=0)
        return cls(grid, v, level)

    @classmethod
    def constant(cls, grid, vector, level=0):
        vector = np.asarray(vector, dtype=complex)
        shape = _level_shape(grid, level)
        return cls(grid, np.broadcast_to(vector, shape + vector.shape).copy(), level)


def _level_shape(grid, level):
    if grid.kind == "torus":
        if level != 0:
            raise ShapeError("torus fields have a single level")
        return grid.shape
    return grid.level_shape(level)


@dataclass(frozen=True)
class BoxGrid:
    """Box ``[0, n h]^4`` with levels ``{0..n}^4``, ``{0..n-1}^4``, ``{0..n-2}^4``."""

    n: int
    h: float = 1.0

    def __post_init__(self):
        if self.n < 3:
            raise DomainError(f"n must be >= 3 so that level 2 is nonempty, got {self.n}")
        if not self.h > 0:
            raise DomainError("h must be positive")

    kind = "box"

    def level_shape(self, level):
        if level not in (0, 1, 2):
            raise ShapeError(f"level must be 0, 1 or 2, got {level}")
        return (self.n + 1 - level,) * 4

    def level_size(self, level):
        return (self.n + 1 - level) ** 4

    def points(self, level=0):
        x = np.arange(self.n + 1 - level) * self.h
        return np.stack(np.meshgrid(x, x, x, x, indexing="ij"), axis=-1)

    def to_json(self):
        return {"type": "box", "n": self.n, "h": self.h}
