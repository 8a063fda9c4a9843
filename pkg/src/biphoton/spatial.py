"""Transverse spatial amplitudes, density operators and parity functionals.

Two functionals of the transverse degree of freedom control the behaviour
of the mirror-unbalanced interferometer:

* the flip overlap  alpha = integral dx rho(-x, x)  of the one-photon
  density operator, which weights the singles fringe amplitude, and
* the pump parity overlap  beta = integral dx phi*(x) phi(-x)  of the pump
  amplitude, which controls the coincidence fringes.

Both are real (they are traces of products of Hermitian operators), so the
phase of either overlap is 0 or pi whenever its magnitude is nonzero.

Discretization convention: delta functions in x become Kronecker deltas
carrying a 1/dx weight that is absorbed into a unit-trace matrix,
``matrix[i, j] = rho(x_i, x_j) * dx``.  Traces and overlaps are then plain
sums, dimensionless and stable under grid refinement.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import NotPositive

__all__ = [
    "SpatialGrid",
    "SpatialAmplitude",
    "SpatialDensityOperator",
    "ParityOverlap",
    "default_spatial_grid",
    "gaussian_amplitude",
    "hermite_gauss1_amplitude",
    "flip_overlap",
    "pump_parity_overlap",
    "parity_decompose",
    "eigendecompose",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-9
EIGENVALUE_FLOOR = -1e-10


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform transverse grid, symmetric about x = 0 with x = 0 a node."""

    half_width: float
    point_count: int

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")
        if self.point_count < 3 or self.point_count % 2 == 0:
            raise ValueError("point_count must be an odd integer >= 3")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / (self.point_count - 1)

    def positions(self) -> np.ndarray:
        # (signed integer index) * spacing: the node at -x_i is the exact
        # floating-point negation of the node at x_i, so parity operations
        # are exact index reversals with no rounding skew.
        center = (self.point_count - 1) // 2
        return (np.arange(self.point_count) - center) * self.spacing

    @property
    def center_index(self) -> int:
        return self.point_count // 2


def default_spatial_grid(point_count: int = 257, half_width: float = 3e-3) -> SpatialGrid:
    """3 mm half width resolves a millimetre-scale pump waist comfortably."""
    return SpatialGrid(half_width=half_width, point_count=point_count)


@dataclass(frozen=True)
class SpatialAmplitude:
    """Complex transverse amplitude phi(x) with sum |phi|^2 dx = 1."""

    grid: SpatialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.point_count,):
            raise ValueError("values must match the grid point count")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        n = self.norm_squared()
        if abs(n - 1.0) > TRACE_TOL:
            raise ValueError(f"amplitude not normalized: sum|phi|^2 dx = {n!r}")

    @classmethod
    def from_samples(cls, grid: SpatialGrid, values: Sequence[complex]) -> "SpatialAmplitude":
        v = np.asarray(values, dtype=complex)
        n = math.sqrt(float(np.sum(np.abs(v) ** 2)) * grid.spacing)
        if n < 1e-150:
            raise ValueError("cannot normalize a zero amplitude")
        return cls(grid, v / n)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2)) * self.grid.spacing

    def flipped(self) -> np.ndarray:
        """Samples of phi(-x); exact index reversal on the symmetric grid."""
        return self.values[::-1]


def gaussian_amplitude(grid: SpatialGrid, waist: float, center: float = 0.0) -> SpatialAmplitude:
    """Gaussian beam profile exp(-(x - center)^2 / waist^2), normalized.

    ``waist`` is the 1/e^2 intensity radius, the usual beam-waist
    convention.
    """
    x = grid.positions()
    return SpatialAmplitude.from_samples(grid, np.exp(-((x - center) / waist) ** 2))


def hermite_gauss1_amplitude(grid: SpatialGrid, waist: float) -> SpatialAmplitude:
    """First odd Hermite-Gauss mode, x * exp(-x^2 / waist^2), normalized."""
    x = grid.positions()
    return SpatialAmplitude.from_samples(grid, x * np.exp(-(x / waist) ** 2))


@dataclass(frozen=True)
class SpatialDensityOperator:
    """One-photon transverse density operator in unit-trace discretization."""

    grid: SpatialGrid
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.grid.point_count
        if m.shape != (n, n):
            raise ValueError("matrix must be N x N for the grid")
        scale = max(1.0, float(np.max(np.abs(m))))
        if float(np.max(np.abs(m - m.conj().T))) > HERMITICITY_TOL * scale:
            raise ValueError("matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace must be 1, got {tr!r}")
        low = float(np.min(np.linalg.eigvalsh(m)))
        if low < EIGENVALUE_FLOOR:
            raise NotPositive(f"eigenvalue {low!r} below tolerance {EIGENVALUE_FLOOR}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def coherent(cls, phi: SpatialAmplitude) -> "SpatialDensityOperator":
        """Pure state: rho = |phi><phi|, matrix = outer(phi, phi*) dx."""
        v = phi.values
        return cls(phi.grid, np.outer(v, v.conj()) * phi.grid.spacing)

    @classmethod
    def incoherent(cls, phi: SpatialAmplitude) -> "SpatialDensityOperator":
        """Position-diagonal mixture with weights |phi(x_i)|^2 dx."""
        w = np.abs(phi.values) ** 2 * phi.grid.spacing
        return cls(phi.grid, np.diag(w.astype(complex)))

    @classmethod
    def general(cls, grid: SpatialGrid, matrix: np.ndarray) -> "SpatialDensityOperator":
        return cls(grid, matrix)

    @classmethod
    def from_csv(cls, path, grid: SpatialGrid) -> "SpatialDensityOperator":
        """Read a row-major matrix of interleaved (re, im) pairs."""
        raw = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
        n = grid.point_count
        if raw.shape != (n, 2 * n):
            raise ValueError(
                f"expected {n} rows x {2 * n} columns of re,im pairs, got {raw.shape}")
        return cls(grid, raw[:, 0::2] + 1j * raw[:, 1::2])

    def to_csv(self, path) -> None:
        n = self.grid.point_count
        flat = np.empty((n, 2 * n))
        flat[:, 0::2] = self.matrix.real
        flat[:, 1::2] = self.matrix.imag
        np.savetxt(path, flat, delimiter=",", fmt="%.17e")


@dataclass(frozen=True)
class ParityOverlap:
    """Polar form of a parity functional: magnitude in [0, 1], phase in rad."""

    magnitude: float
    phase: float

    def __post_init__(self):
        if self.magnitude > 1.0 + 1e-9:
            raise ValueError(f"overlap magnitude {self.magnitude!r} exceeds 1")

    @classmethod
    def from_complex(cls, z: complex) -> "ParityOverlap":
        return cls(magnitude=abs(z), phase=cmath.phase(z) if abs(z) > 0.0 else 0.0)

    def as_complex(self) -> complex:
        return self.magnitude * cmath.exp(1j * self.phase)


def flip_overlap(rho: SpatialDensityOperator) -> ParityOverlap:
    """Overlap of a one-photon state with its spatially flipped copy.

    Discretized anti-diagonal sum: alpha = sum_i matrix[N-1-i, i], which is
    the unit-trace rendering of integral dx rho(-x, x).  For an incoherent
    (position-diagonal) operator only the x = 0 node survives, so the
    magnitude is |phi(0)|^2 dx and vanishes linearly with the spacing.
    """
    m = rho.matrix
    alpha = complex(np.sum(m[::-1, :].diagonal()))
    return ParityOverlap.from_complex(alpha)


def pump_parity_overlap(phi: SpatialAmplitude) -> ParityOverlap:
    """beta = sum_i phi*(x_i) phi(-x_i) dx; (1, 0) even, (1, pi) odd."""
    beta = complex(np.sum(phi.values.conj() * phi.flipped()) * phi.grid.spacing)
    return ParityOverlap.from_complex(beta)


def parity_decompose(phi: SpatialAmplitude) -> Tuple[np.ndarray, np.ndarray]:
    """Split phi into even and odd parts (returned as raw sample arrays).

    even(x) = (phi(x) + phi(-x))/2 and odd(x) = (phi(x) - phi(-x))/2; the
    parts sum back to phi exactly and their squared norms (times dx) add to
    one.  The parts are generally not unit-normalized themselves, hence raw
    arrays rather than SpatialAmplitude instances.
    """
    v = phi.values
    f = phi.flipped()
    return 0.5 * (v + f), 0.5 * (v - f)


def eigendecompose(
    rho: SpatialDensityOperator, weight_floor: float = 1e-12
) -> List[Tuple[float, SpatialAmplitude]]:
    """Coherent-mode decomposition of a density operator.

    Returns (weight, mode) pairs sorted by descending weight.  Weights are
    the eigenvalues of the unit-trace matrix and sum to one; modes are
    orthonormal in the sum |phi|^2 dx sense.  Eigenvalues below
    ``weight_floor`` are dropped; an eigenvalue below the positivity
    tolerance raises NotPositive.
    """
    vals, vecs = np.linalg.eigh(rho.matrix)
    if float(vals.min()) < EIGENVALUE_FLOOR:
        raise NotPositive(f"eigenvalue {float(vals.min())!r} below tolerance")
    dx = rho.grid.spacing
    modes: List[Tuple[float, SpatialAmplitude]] = []
    for k in range(vals.size - 1, -1, -1):
        w = float(vals[k])
        if w <= weight_floor:
            break
        modes.append((w, SpatialAmplitude(rho.grid, vecs[:, k] / math.sqrt(dx))))
    return modes
