"""Two-photon and reduced one-photon states.

The two-photon description is structurally separable between the spatial
and spectral sectors: each sector is chosen independently and no
cross-correlation between them can be expressed.  The sectors themselves
may be entangled internally -- the default down-conversion state is
position-correlated and frequency-anti-correlated.

Reduction to the one-photon state traces over the second photon slot of
each sector.  For the correlated-pump spatial sector this produces a
position-diagonal (fully incoherent) operator regardless of the pump
profile: the photons are jointly coherent but individually not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import units
from .spatial import (
    SpatialAmplitude,
    SpatialDensityOperator,
    SpatialGrid,
    default_spatial_grid,
    gaussian_amplitude,
)
from .spectral import (
    FrequencyGrid,
    Rectangular,
    SpectralDensity,
    default_frequency_grid,
    normalize,
)

__all__ = [
    "CorrelatedPump",
    "GeneralSpatial",
    "AntiCorrelated",
    "GeneralSpectral",
    "DiagonalDensity",
    "GeneralDensity",
    "TwoPhotonState",
    "OnePhotonState",
    "reduced_spatial_operator",
    "reduce_to_one_photon",
    "default_spdc_state",
    "DEFAULT_PUMP_WAVELENGTH",
    "DEFAULT_FILTER_CENTER",
    "DEFAULT_FILTER_BANDWIDTH",
    "DEFAULT_PUMP_WAIST",
]

DEFAULT_PUMP_WAVELENGTH = 405e-9  # m
DEFAULT_FILTER_CENTER = 810e-9    # m
DEFAULT_FILTER_BANDWIDTH = 10e-9  # m
DEFAULT_PUMP_WAIST = 1e-3         # m

NORM_TOL = 1e-9


@dataclass(frozen=True)
class CorrelatedPump:
    """Spatial sector phi(x, x') = phi(x) delta(x - x'): both photons share
    the pump's transverse position."""

    pump: SpatialAmplitude

    @property
    def grid(self) -> SpatialGrid:
        return self.pump.grid

    def describe(self) -> str:
        return "correlated_pump"


@dataclass(frozen=True)
class GeneralSpatial:
    """Arbitrary two-photon transverse amplitude phi(x_i, x_j).

    Normalization: sum |phi_ij|^2 dx^2 = 1.
    """

    grid: SpatialGrid
    amplitude: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitude, dtype=complex)
        n = self.grid.point_count
        if a.shape != (n, n):
            raise ValueError("amplitude must be N x N for the grid")
        total = float(np.sum(np.abs(a) ** 2)) * self.grid.spacing**2
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"joint spatial norm must be 1, got {total!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitude", a)

    @classmethod
    def from_samples(cls, grid: SpatialGrid, amplitude) -> "GeneralSpatial":
        a = np.asarray(amplitude, dtype=complex)
        total = np.sqrt(np.sum(np.abs(a) ** 2) * grid.spacing**2)
        if total < 1e-150:
            raise ValueError("cannot normalize a zero amplitude")
        return cls(grid, a / total)

    @classmethod
    def product(cls, phi1: SpatialAmplitude, phi2: SpatialAmplitude) -> "GeneralSpatial":
        if phi1.grid != phi2.grid:
            raise ValueError("amplitudes must share a grid")
        return cls(phi1.grid, np.outer(phi1.values, phi2.values))

    def describe(self) -> str:
        return "general_spatial"


@dataclass(frozen=True)
class AntiCorrelated:
    """Spectral sector psi(W, W') = psi(W) delta(W + W'), zero phases.

    ``density`` is |psi(W)|^2; the amplitude used by the simulator is its
    square root.  Signal and idler detunings are exactly opposite, as for
    down-conversion with a monochromatic pump.
    """

    density: SpectralDensity

    def describe(self) -> str:
        return f"anti_correlated({self.density.describe()})"


@dataclass(frozen=True)
class GeneralSpectral:
    """Arbitrary two-photon spectral amplitude psi(W_k, W_l).

    Normalization: sum |psi_kl|^2 dW^2 = 1.
    """

    grid: FrequencyGrid
    amplitude: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitude, dtype=complex)
        m = self.grid.point_count
        if a.shape != (m, m):
            raise ValueError("amplitude must be M x M for the grid")
        total = float(np.sum(np.abs(a) ** 2)) * self.grid.spacing**2
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"joint spectral norm must be 1, got {total!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitude", a)

    @classmethod
    def from_samples(cls, grid: FrequencyGrid, amplitude) -> "GeneralSpectral":
        a = np.asarray(amplitude, dtype=complex)
        total = np.sqrt(np.sum(np.abs(a) ** 2) * grid.spacing**2)
        if total < 1e-150:
            raise ValueError("cannot normalize a zero amplitude")
        return cls(grid, a / total)

    def describe(self) -> str:
        return "general_spectral"


SpatialSector = Union[CorrelatedPump, GeneralSpatial]
SpectralSector = Union[AntiCorrelated, GeneralSpectral]


@dataclass(frozen=True)
class TwoPhotonState:
    """Separable (spatial x spectral) biphoton description."""

    spatial: SpatialSector
    spectral: SpectralSector
    pump_frequency: float

    def __post_init__(self):
        if self.pump_frequency <= 0.0:
            raise ValueError("pump_frequency must be positive")

    def describe(self) -> dict:
        return {
            "spatial": self.spatial.describe(),
            "spectral": self.spectral.describe(),
            "pump_frequency": self.pump_frequency,
        }


@dataclass(frozen=True)
class DiagonalDensity:
    """Frequency-diagonal one-photon spectral sector with weights q_k
    summing to one (q_k = |psi(W_k)|^2 dW)."""

    grid: FrequencyGrid
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (self.grid.point_count,):
            raise ValueError("weights must match the grid")
        if np.any(w < -1e-12):
            raise ValueError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > NORM_TOL:
            raise ValueError("weights must sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


@dataclass(frozen=True)
class GeneralDensity:
    """Full M x M Hermitian one-photon spectral density matrix, unit trace."""

    grid: FrequencyGrid
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        size = self.grid.point_count
        if m.shape != (size, size):
            raise ValueError("matrix must be M x M for the grid")
        scale = max(1.0, float(np.max(np.abs(m))))
        if float(np.max(np.abs(m - m.conj().T))) > 1e-12 * scale:
            raise ValueError("matrix must be Hermitian")
        if abs(float(np.real(np.trace(m))) - 1.0) > NORM_TOL:
            raise ValueError("trace must be 1")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class OnePhotonState:
    """Reduced single-photon state: spatial operator, spectral sector and
    the carrier frequency (half the pump frequency)."""

    spatial: SpatialDensityOperator
    spectral: Union[DiagonalDensity, GeneralDensity]
    central_frequency: float


def reduced_spatial_operator(state: TwoPhotonState) -> SpatialDensityOperator:
    """Spatial sector of the reduced one-photon state.

    A correlated pump reduces to the position-diagonal mixture; a general
    amplitude reduces by the slot partial trace rho = A A^dagger.
    """
    if isinstance(state.spatial, CorrelatedPump):
        return SpatialDensityOperator.incoherent(state.spatial.pump)
    a = state.spatial.amplitude * state.spatial.grid.spacing
    return SpatialDensityOperator(state.spatial.grid, a @ a.conj().T)


def reduce_to_one_photon(
    state: TwoPhotonState, frequency_grid: FrequencyGrid | None = None
) -> OnePhotonState:
    """Trace out one photon slot of each sector.

    Correlated pump -> incoherent (position-diagonal) spatial operator;
    anti-correlated spectrum -> frequency-diagonal spectral sector.  General
    sectors reduce by an explicit partial trace of the slot-ordered
    amplitude, rho = A A^dagger in the discrete convention.
    """
    rho_x = reduced_spatial_operator(state)

    if isinstance(state.spectral, AntiCorrelated):
        grid = frequency_grid or default_frequency_grid(state.spectral.density)
        d = normalize(state.spectral.density, grid).sample(grid)
        w = d * np.full(grid.point_count, grid.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        spectral: Union[DiagonalDensity, GeneralDensity] = DiagonalDensity(
            grid, w / w.sum())
    else:
        a = state.spectral.amplitude * state.spectral.grid.spacing
        spectral = GeneralDensity(state.spectral.grid, a @ a.conj().T)

    return OnePhotonState(
        spatial=rho_x,
        spectral=spectral,
        central_frequency=state.pump_frequency / 2.0,
    )


def default_spdc_state(
    spatial_grid: SpatialGrid | None = None,
    pump_waist: float = DEFAULT_PUMP_WAIST,
) -> TwoPhotonState:
    """Collinear degenerate down-conversion defaults.

    A 405 nm monochromatic pump with a 1 mm Gaussian waist, detected behind
    10 nm rectangular bandpass filters centered at 810 nm.  The filter
    passband is taken as the effective one-photon spectral density (the
    intrinsic down-conversion bandwidth is broader than the filters and is
    not modelled).
    """
    grid = spatial_grid or default_spatial_grid()
    pump = gaussian_amplitude(grid, waist=pump_waist)
    width = units.bandwidth_to_angular(DEFAULT_FILTER_CENTER, DEFAULT_FILTER_BANDWIDTH)
    return TwoPhotonState(
        spatial=CorrelatedPump(pump),
        spectral=AntiCorrelated(SpectralDensity(Rectangular(width))),
        pump_frequency=units.omega_from_wavelength(DEFAULT_PUMP_WAVELENGTH),
    )
