"""Brute-force discrete-mode two-photon simulator.

Independent validation engine for the closed-form interferograms.  The
two-photon state lives on (path x position x frequency) modes; every
optical element is applied as an explicit single-photon map on the ordered
two-photon amplitude tensor, and rates are mode-summed detection
probabilities.  Nothing here knows the closed forms: agreement between the
two engines is the package's core self-check, and the simulator also covers
the arbitrary-pump cases for which no closed form exists.

Two representations are provided:

* a branch-sum form, a short list of product terms (path pair, spatial
  factor, spectral factor).  Factors stay diagonal / anti-diagonal for
  correlated inputs, so memory is O(N + M) per branch and default grids run
  at interactive speed;
* a dense tensor over all (2 N M)^2 ordered two-photon amplitudes, feasible
  only for small grids, used to cross-check the branch-sum bookkeeping.

Conventions: the 50:50 beam splitter maps a -> (a + i b)/sqrt(2),
b -> (i a + b)/sqrt(2) ("symmetric"); the alternative "conjugate"
convention carries -i on the cross terms.  Reported rates are convention
invariant and that is verified by tests rather than assumed.  A delay tau
in one arm multiplies each photon amplitude in that arm by
exp(-i (w_p/2 + W_k) tau); a spatial flip reverses the position index.
Rates are normalized so the incoherent background equals one.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BudgetExceeded,
    GridAsymmetry,
    IncompletePipeline,
    UnknownElement,
)
from .interferometer import Interferogram, InterferometerConfig, MZIM, tau_axis
from .spatial import SpatialGrid, eigendecompose
from .spectral import FrequencyGrid, default_frequency_grid, normalize
from .states import (
    AntiCorrelated,
    CorrelatedPump,
    GeneralSpatial,
    GeneralSpectral,
    TwoPhotonState,
    reduce_to_one_photon,
)

__all__ = [
    "BeamSplitter",
    "Delay",
    "SpatialFlip",
    "RelabelOutputs",
    "build_pipeline",
    "Factor",
    "Branch",
    "BranchSumState",
    "DenseTensorState",
    "build_initial_state",
    "apply_element",
    "apply_pipeline",
    "coincidence_rate",
    "singles_rate",
    "total_norm",
    "exchange_asymmetry",
    "simulate_mixture",
    "to_dense",
    "oracle_scan",
    "SYMMETRIC",
    "CONJUGATE",
]

SYMMETRIC = "symmetric"
CONJUGATE = "conjugate"

DEFAULT_DENSE_BUDGET = 1 << 30  # bytes

_INPUT_PATHS = ("a", "b")
_OUTPUT_PATHS = ("c", "d")


# ---------------------------------------------------------------------------
# pipeline elements


@dataclass(frozen=True)
class BeamSplitter:
    convention: str = SYMMETRIC

    def matrix(self) -> np.ndarray:
        cross = 1j if self.convention == SYMMETRIC else -1j
        if self.convention not in (SYMMETRIC, CONJUGATE):
            raise ValueError(f"unknown beam-splitter convention {self.convention!r}")
        return np.array([[1.0, cross], [cross, 1.0]], dtype=complex) / math.sqrt(2.0)


@dataclass(frozen=True)
class Delay:
    arm: str
    tau: float
    pump_frequency: float


@dataclass(frozen=True)
class SpatialFlip:
    arm: str


@dataclass(frozen=True)
class RelabelOutputs:
    pass


Element = Union[BeamSplitter, Delay, SpatialFlip, RelabelOutputs]


def build_pipeline(
    cfg: InterferometerConfig, tau: float, convention: str = SYMMETRIC
) -> List[Element]:
    """Element sequence for the configured interferometer at delay tau."""
    elements: List[Element] = [BeamSplitter(convention)]
    elements.append(Delay(cfg.delay_arm, tau, cfg.pump_frequency))
    if cfg.kind == MZIM:
        elements.append(SpatialFlip(cfg.flip_arm))
    elements.append(BeamSplitter(convention))
    elements.append(RelabelOutputs())
    return elements


# ---------------------------------------------------------------------------
# structured factors

_DIAG = "diag"
_ANTIDIAG = "antidiag"
_FULL = "full"


@dataclass(frozen=True)
class Factor:
    """One sector of a product branch: diagonal, anti-diagonal or full.

    ``diag`` holds S[i, i] = data[i]; ``antidiag`` holds
    S[i, N-1-i] = data[i]; ``full`` holds the complete matrix.  The
    structured forms keep correlated sectors at O(N) storage and make the
    common inner products O(N).
    """

    kind: str
    data: np.ndarray

    @classmethod
    def diagonal(cls, values: Sequence[complex]) -> "Factor":
        return cls(_DIAG, np.asarray(values, dtype=complex))

    @classmethod
    def antidiagonal(cls, values: Sequence[complex]) -> "Factor":
        return cls(_ANTIDIAG, np.asarray(values, dtype=complex))

    @classmethod
    def full(cls, matrix: np.ndarray) -> "Factor":
        return cls(_FULL, np.asarray(matrix, dtype=complex))

    @property
    def size(self) -> int:
        return self.data.shape[0]

    def flip_slot(self, slot: int) -> "Factor":
        """Reverse the position index of one photon slot."""
        if self.kind == _FULL:
            return Factor(_FULL, self.data[::-1, :] if slot == 0 else self.data[:, ::-1])
        if self.kind == _DIAG:
            # S'[i, i'] = S[N-1-i, i'] puts weight at i' = N-1-i.
            vec = self.data[::-1] if slot == 0 else self.data
            return Factor(_ANTIDIAG, vec)
        vec = self.data[::-1] if slot == 0 else self.data
        return Factor(_DIAG, vec)

    def scale_slot(self, slot: int, phases: np.ndarray) -> "Factor":
        """Multiply by a mode-diagonal phase on one photon slot."""
        if self.kind == _FULL:
            return Factor(
                _FULL,
                self.data * (phases[:, None] if slot == 0 else phases[None, :]))
        if self.kind == _DIAG:
            return Factor(_DIAG, self.data * phases)
        # antidiagonal: slot 0 sees index k, slot 1 sees index N-1-k.
        vec = phases if slot == 0 else phases[::-1]
        return Factor(_ANTIDIAG, self.data * vec)

    def transpose(self) -> "Factor":
        if self.kind == _FULL:
            return Factor(_FULL, self.data.T.copy())
        if self.kind == _DIAG:
            return self
        return Factor(_ANTIDIAG, self.data[::-1])

    def to_full(self) -> np.ndarray:
        n = self.size
        if self.kind == _FULL:
            return np.array(self.data)
        out = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        if self.kind == _DIAG:
            out[idx, idx] = self.data
        else:
            out[idx, n - 1 - idx] = self.data
        return out

    def inner(self, other: "Factor") -> complex:
        """Frobenius inner product sum(conj(self) * other)."""
        a, b = self, other
        if a.kind == _FULL or b.kind == _FULL:
            if a.kind != _FULL:
                return _structured_vs_full(a, b.data, conj_first=True)
            if b.kind != _FULL:
                return _structured_vs_full(b, a.data, conj_first=False)
            return complex(np.vdot(a.data, b.data))
        if a.kind == b.kind:
            return complex(np.vdot(a.data, b.data))
        # diagonal against anti-diagonal: only the central index overlaps.
        c = a.size // 2
        return complex(np.conj(a.data[c]) * b.data[c])


def _structured_vs_full(structured: Factor, full: np.ndarray, conj_first: bool) -> complex:
    n = structured.size
    idx = np.arange(n)
    cols = idx if structured.kind == _DIAG else n - 1 - idx
    entries = full[idx, cols]
    if conj_first:
        return complex(np.sum(np.conj(structured.data) * entries))
    return complex(np.sum(np.conj(entries) * structured.data))


# ---------------------------------------------------------------------------
# branch-sum state


@dataclass(frozen=True)
class Branch:
    path1: str
    path2: str
    weight: complex
    spatial: Factor
    spectral: Factor


@dataclass(frozen=True)
class BranchSumState:
    """Two-photon amplitude as a short sum of product branches.

    The represented ordered tensor is
    A[(p, i, k), (p', i', k')] = sum over branches with paths (p, p') of
    weight * S[i, i'] * F[k, k'].
    """

    spatial_grid: SpatialGrid
    frequency_grid: FrequencyGrid
    branches: Tuple[Branch, ...]
    relabeled: bool = False

    @property
    def paths(self) -> Tuple[str, str]:
        return _OUTPUT_PATHS if self.relabeled else _INPUT_PATHS


def _spectral_phases(grid: FrequencyGrid, tau: float, pump_frequency: float) -> np.ndarray:
    return np.exp(-1j * (pump_frequency / 2.0 + grid.omegas()) * tau)


def build_initial_state(
    state: TwoPhotonState,
    spatial_grid: SpatialGrid,
    frequency_grid: FrequencyGrid,
) -> BranchSumState:
    """Both photons in path a, factors discretized on the given grids.

    Correlated sectors become structured factors carrying sqrt(quadrature
    weight) amplitudes; general sectors become full matrices.  The state is
    exchange-symmetrized and normalized to unit total amplitude norm.
    """
    for grid in (spatial_grid, frequency_grid):
        if grid.point_count % 2 == 0:
            raise GridAsymmetry("grids must have odd point counts")
    if isinstance(state.spatial, CorrelatedPump):
        if state.spatial.grid != spatial_grid:
            raise GridAsymmetry("state's spatial grid differs from the requested grid")
        s_factor = Factor.diagonal(
            state.spatial.pump.values * math.sqrt(spatial_grid.spacing))
    elif isinstance(state.spatial, GeneralSpatial):
        if state.spatial.grid != spatial_grid:
            raise GridAsymmetry("state's spatial grid differs from the requested grid")
        s_factor = Factor.full(state.spatial.amplitude * spatial_grid.spacing)
    else:
        raise UnknownElement(f"unsupported spatial sector {type(state.spatial)!r}")

    if isinstance(state.spectral, AntiCorrelated):
        density = normalize(state.spectral.density, frequency_grid)
        d = density.sample(frequency_grid)
        w = np.full(frequency_grid.point_count, frequency_grid.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        f_factor = Factor.antidiagonal(np.sqrt(d * w).astype(complex))
    elif isinstance(state.spectral, GeneralSpectral):
        if state.spectral.grid != frequency_grid:
            raise GridAsymmetry("state's frequency grid differs from the requested grid")
        f_factor = Factor.full(state.spectral.amplitude * frequency_grid.spacing)
    else:
        raise UnknownElement(f"unsupported spectral sector {type(state.spectral)!r}")

    branch = Branch("a", "a", 1.0 + 0.0j, s_factor, f_factor)
    out = BranchSumState(spatial_grid, frequency_grid, (branch,))
    out = _symmetrized(out)
    norm = math.sqrt(total_norm(out))
    if norm <= 0.0:
        raise ValueError("state has zero norm on these grids")
    return _rescaled(out, 1.0 / norm)


def _rescaled(state: BranchSumState, factor: float) -> BranchSumState:
    return replace(
        state,
        branches=tuple(replace(b, weight=b.weight * factor) for b in state.branches))


def _swapped_branches(branches: Iterable[Branch]) -> Tuple[Branch, ...]:
    return tuple(
        Branch(b.path2, b.path1, b.weight, b.spatial.transpose(), b.spectral.transpose())
        for b in branches)


def _factor_is_symmetric(factor: Factor) -> bool:
    if factor.kind == _DIAG:
        return True
    if factor.kind == _ANTIDIAG:
        return bool(np.array_equal(factor.data, factor.data[::-1]))
    return bool(np.array_equal(factor.data, factor.data.T))


def _symmetrized(state: BranchSumState) -> BranchSumState:
    # Structural check: a branch with equal path labels and
    # transpose-symmetric factors is exchange symmetric term by term.
    # (The numeric asymmetry norm is useless here -- for a symmetric state
    # it is a catastrophically cancelled zero.)
    if all(b.path1 == b.path2 and _factor_is_symmetric(b.spatial)
           and _factor_is_symmetric(b.spectral) for b in state.branches):
        return state
    halved = tuple(replace(b, weight=0.5 * b.weight) for b in state.branches)
    sym = halved + _swapped_branches(halved)
    out = replace(state, branches=_coalesced(sym))
    return _rescaled(out, 1.0 / math.sqrt(total_norm(out)))


def _branch_inner(x: Branch, y: Branch) -> complex:
    if (x.path1, x.path2) != (y.path1, y.path2):
        return 0.0
    return (np.conj(x.weight) * y.weight
            * x.spatial.inner(y.spatial)
            * x.spectral.inner(y.spectral))


def _group_norm(branches: Sequence[Branch]) -> float:
    total = 0.0
    for i, x in enumerate(branches):
        total += _branch_inner(x, x).real
        for y in branches[i + 1:]:
            total += 2.0 * _branch_inner(x, y).real
    return total


def total_norm(state: BranchSumState) -> float:
    """Squared amplitude norm of the ordered two-photon tensor."""
    groups = {}
    for b in state.branches:
        groups.setdefault((b.path1, b.path2), []).append(b)
    return float(sum(_group_norm(g) for g in groups.values()))


def exchange_asymmetry(state: BranchSumState) -> float:
    """Norm of (A - A_swapped); zero for a bosonic (symmetric) state."""
    swapped = _swapped_branches(state.branches)
    norm_a = total_norm(state)
    norm_b = total_norm(replace(state, branches=swapped))
    cross = 0.0
    for x in state.branches:
        for y in swapped:
            cross += _branch_inner(x, y).real
    return math.sqrt(max(0.0, norm_a + norm_b - 2.0 * cross))


def _coalesced(branches: Sequence[Branch]) -> Tuple[Branch, ...]:
    merged: List[Branch] = []
    for b in branches:
        if abs(b.weight) == 0.0:
            continue
        for i, m in enumerate(merged):
            if ((b.path1, b.path2) == (m.path1, m.path2)
                    and b.spatial.kind == m.spatial.kind
                    and b.spectral.kind == m.spectral.kind
                    and np.array_equal(b.spatial.data, m.spatial.data)
                    and np.array_equal(b.spectral.data, m.spectral.data)):
                merged[i] = replace(m, weight=m.weight + b.weight)
                break
        else:
            merged.append(b)
    return tuple(m for m in merged if abs(m.weight) > 0.0)


def apply_element(state: BranchSumState, element: Element) -> BranchSumState:
    """Apply one optical element; returns a new state.

    A beam splitter multiplies the branch count by at most four; delays and
    flips act in place on factors; relabelling renames a -> c and b -> d.
    Branches with identical path pairs and factor data are coalesced, and
    the count never exceeds 16 across a full pipeline.
    """
    if isinstance(element, BeamSplitter):
        if state.relabeled:
            raise IncompletePipeline("cannot add elements after output relabelling")
        u = element.matrix()
        out: List[Branch] = []
        for b in state.branches:
            for p1 in _INPUT_PATHS:
                c1 = u[_INPUT_PATHS.index(p1), _INPUT_PATHS.index(b.path1)]
                if c1 == 0.0:
                    continue
                for p2 in _INPUT_PATHS:
                    c2 = u[_INPUT_PATHS.index(p2), _INPUT_PATHS.index(b.path2)]
                    if c2 == 0.0:
                        continue
                    out.append(Branch(p1, p2, b.weight * c1 * c2, b.spatial, b.spectral))
        return replace(state, branches=_coalesced(out))

    if isinstance(element, Delay):
        if state.relabeled:
            raise IncompletePipeline("cannot add elements after output relabelling")
        phases = _spectral_phases(state.frequency_grid, element.tau, element.pump_frequency)
        out = []
        for b in state.branches:
            spectral = b.spectral
            if b.path1 == element.arm:
                spectral = spectral.scale_slot(0, phases)
            if b.path2 == element.arm:
                spectral = spectral.scale_slot(1, phases)
            out.append(replace(b, spectral=spectral))
        return replace(state, branches=_coalesced(out))

    if isinstance(element, SpatialFlip):
        if state.relabeled:
            raise IncompletePipeline("cannot add elements after output relabelling")
        out = []
        for b in state.branches:
            spatial = b.spatial
            if b.path1 == element.arm:
                spatial = spatial.flip_slot(0)
            if b.path2 == element.arm:
                spatial = spatial.flip_slot(1)
            out.append(replace(b, spatial=spatial))
        return replace(state, branches=_coalesced(out))

    if isinstance(element, RelabelOutputs):
        mapping = dict(zip(_INPUT_PATHS, _OUTPUT_PATHS))
        out = tuple(
            replace(b, path1=mapping[b.path1], path2=mapping[b.path2])
            for b in state.branches)
        return replace(state, branches=out, relabeled=True)

    raise UnknownElement(f"unknown element {element!r}")


def apply_pipeline(state: BranchSumState, elements: Iterable[Element]) -> BranchSumState:
    for element in elements:
        state = apply_element(state, element)
    return state


def _path_pair_norms(state: BranchSumState) -> dict:
    groups: dict = {}
    for b in state.branches:
        groups.setdefault((b.path1, b.path2), []).append(b)
    return {pair: _group_norm(g) for pair, g in groups.items()}


def coincidence_rate(state: BranchSumState) -> float:
    """Probability of one photon in each output port, background-1 scaled."""
    if not state.relabeled:
        raise IncompletePipeline("apply the full pipeline (with relabelling) first")
    t = _path_pair_norms(state)
    return 2.0 * (t.get(("c", "d"), 0.0) + t.get(("d", "c"), 0.0))


def singles_rate(state: BranchSumState, port: str) -> float:
    """Expected photon number at one output port, background-1 scaled."""
    if not state.relabeled:
        raise IncompletePipeline("apply the full pipeline (with relabelling) first")
    if port not in _OUTPUT_PATHS:
        raise ValueError("port must be 'c' or 'd'")
    other = "d" if port == "c" else "c"
    t = _path_pair_norms(state)
    return (2.0 * t.get((port, port), 0.0)
            + t.get((port, other), 0.0)
            + t.get((other, port), 0.0))


# ---------------------------------------------------------------------------
# dense cross-check representation


@dataclass(frozen=True)
class DenseTensorState:
    """Full ordered amplitude tensor over (path, position, frequency)^2."""

    spatial_grid: SpatialGrid
    frequency_grid: FrequencyGrid
    tensor: np.ndarray  # shape (2, N, M, 2, N, M)
    relabeled: bool = False

    def norm(self) -> float:
        return float(np.sum(np.abs(self.tensor) ** 2))

    def exchange_asymmetry(self) -> float:
        swapped = self.tensor.transpose(3, 4, 5, 0, 1, 2)
        return float(np.sqrt(np.sum(np.abs(self.tensor - swapped) ** 2)))


def to_dense(state: BranchSumState, budget_bytes: int = DEFAULT_DENSE_BUDGET) -> DenseTensorState:
    """Expand the branch sum into the dense tensor, if it fits the budget."""
    n = state.spatial_grid.point_count
    m = state.frequency_grid.point_count
    amplitudes = (2 * n * m) ** 2
    required = amplitudes * 16  # complex128
    if required > budget_bytes:
        raise BudgetExceeded(
            f"dense tensor needs {required} bytes > budget {budget_bytes}")
    tensor = np.zeros((2, n, m, 2, n, m), dtype=complex)
    paths = state.paths
    for b in state.branches:
        p1 = paths.index(b.path1)
        p2 = paths.index(b.path2)
        tensor[p1, :, :, p2, :, :] += b.weight * np.einsum(
            "ij,kl->ikjl", b.spatial.to_full(), b.spectral.to_full())
    return DenseTensorState(state.spatial_grid, state.frequency_grid, tensor,
                            relabeled=state.relabeled)


def dense_apply_element(state: DenseTensorState, element: Element) -> DenseTensorState:
    if isinstance(element, BeamSplitter):
        if state.relabeled:
            raise IncompletePipeline("cannot add elements after output relabelling")
        u = element.matrix()
        tensor = np.einsum("pq,PQ,qikQIK->pikPIK", u, u, state.tensor)
        return replace(state, tensor=tensor)
    if isinstance(element, Delay):
        if state.relabeled:
            raise IncompletePipeline("cannot add elements after output relabelling")
        arm = _INPUT_PATHS.index(element.arm)
        phases = _spectral_phases(state.frequency_grid, element.tau, element.pump_frequency)
        tensor = state.tensor.copy()
        tensor[arm] = tensor[arm] * phases[None, :, None, None, None]
        tensor[:, :, :, arm] = tensor[:, :, :, arm] * phases[None, None, None, None, :]
        return replace(state, tensor=tensor)
    if isinstance(element, SpatialFlip):
        if state.relabeled:
            raise IncompletePipeline("cannot add elements after output relabelling")
        arm = _INPUT_PATHS.index(element.arm)
        tensor = state.tensor.copy()
        tensor[arm] = tensor[arm, ::-1]
        tensor[:, :, :, arm] = tensor[:, :, :, arm, ::-1]
        return replace(state, tensor=tensor)
    if isinstance(element, RelabelOutputs):
        return replace(state, relabeled=True)
    raise UnknownElement(f"unknown element {element!r}")


def dense_apply_pipeline(state: DenseTensorState, elements: Iterable[Element]) -> DenseTensorState:
    for element in elements:
        state = dense_apply_element(state, element)
    return state


def dense_coincidence_rate(state: DenseTensorState) -> float:
    if not state.relabeled:
        raise IncompletePipeline("apply the full pipeline (with relabelling) first")
    t_cd = float(np.sum(np.abs(state.tensor[0, :, :, 1]) ** 2))
    t_dc = float(np.sum(np.abs(state.tensor[1, :, :, 0]) ** 2))
    return 2.0 * (t_cd + t_dc)


def dense_singles_rate(state: DenseTensorState, port: str) -> float:
    if not state.relabeled:
        raise IncompletePipeline("apply the full pipeline (with relabelling) first")
    p = _OUTPUT_PATHS.index(port)
    o = 1 - p
    t_pp = float(np.sum(np.abs(state.tensor[p, :, :, p]) ** 2))
    t_po = float(np.sum(np.abs(state.tensor[p, :, :, o]) ** 2))
    t_op = float(np.sum(np.abs(state.tensor[o, :, :, p]) ** 2))
    return 2.0 * t_pp + t_po + t_op


# ---------------------------------------------------------------------------
# mixture-averaged singles (independent route for incoherent light)


def _one_photon_singles(
    modes: np.ndarray,
    spectral_amplitude: np.ndarray,
    frequency_grid: FrequencyGrid,
    elements: Iterable[Element],
    port: str,
) -> np.ndarray:
    """Port probabilities for a batch of single-photon spatial modes.

    ``modes`` has one row per coherent mode (already carrying sqrt(dx)
    weights); ``spectral_amplitude`` carries sqrt of the frequency weights.
    Returns P(port) per mode; the frequency-diagonal mixture equals the
    pure-superposition result because no element mixes frequencies.
    """
    branches: List[Tuple[str, np.ndarray, np.ndarray, complex]] = [
        ("a", modes, spectral_amplitude.astype(complex), 1.0 + 0.0j)]
    relabeled = False
    for element in elements:
        if isinstance(element, BeamSplitter):
            u = element.matrix()
            new = []
            for path, s, f, w in branches:
                col = _INPUT_PATHS.index(path)
                for row, out_path in enumerate(_INPUT_PATHS):
                    if u[row, col] != 0.0:
                        new.append((out_path, s, f, w * u[row, col]))
            branches = new
        elif isinstance(element, Delay):
            phases = _spectral_phases(frequency_grid, element.tau, element.pump_frequency)
            branches = [
                (path, s, f * phases if path == element.arm else f, w)
                for path, s, f, w in branches]
        elif isinstance(element, SpatialFlip):
            branches = [
                (path, s[:, ::-1] if path == element.arm else s, f, w)
                for path, s, f, w in branches]
        elif isinstance(element, RelabelOutputs):
            mapping = dict(zip(_INPUT_PATHS, _OUTPUT_PATHS))
            branches = [(mapping[path], s, f, w) for path, s, f, w in branches]
            relabeled = True
        else:
            raise UnknownElement(f"unknown element {element!r}")
    if not relabeled:
        raise IncompletePipeline("apply the full pipeline (with relabelling) first")
    in_port = [b for b in branches if b[0] == port]
    n_modes = modes.shape[0]
    prob = np.zeros(n_modes)
    for i, (_, s1, f1, w1) in enumerate(in_port):
        prob += np.abs(w1) ** 2 * np.real(
            np.einsum("mi,mi->m", s1.conj(), s1)) * float(np.vdot(f1, f1).real)
        for _, s2, f2, w2 in in_port[i + 1:]:
            cross = (np.conj(w1) * w2
                     * np.einsum("mi,mi->m", s1.conj(), s2)
                     * complex(np.vdot(f1, f2)))
            prob += 2.0 * cross.real
    return prob


def simulate_mixture(
    state: TwoPhotonState,
    cfg: InterferometerConfig,
    tau: float,
    spatial_grid: Optional[SpatialGrid] = None,
    frequency_grid: Optional[FrequencyGrid] = None,
    convention: str = SYMMETRIC,
) -> Tuple[float, float]:
    """(singles at port c, coincidence) with mixture-averaged singles.

    The coincidence rate comes from the full pure two-photon state; the
    singles rate is the weight-averaged singles of the coherent modes of
    the reduced one-photon state.  Both routes must agree with the direct
    pure-state evaluation -- this operation exists to validate the fringe
    weighting of the unbalanced interferometer by brute force.
    """
    sgrid, fgrid = _resolve_grids(state, spatial_grid, frequency_grid)
    initial = build_initial_state(state, sgrid, fgrid)
    elements = build_pipeline(cfg, tau, convention)
    final = apply_pipeline(initial, elements)
    coincidence = coincidence_rate(final)

    one = reduce_to_one_photon(state, frequency_grid=fgrid)
    modes = eigendecompose(one.spatial)
    weights = np.array([w for w, _ in modes])
    mode_rows = np.array(
        [m.values for _, m in modes]) * math.sqrt(sgrid.spacing)
    spectral_amplitude = np.sqrt(_diagonal_weights(one))
    per_mode = _one_photon_singles(mode_rows, spectral_amplitude, fgrid, elements, "c")
    singles = 2.0 * float(weights @ per_mode)
    return singles, coincidence


def _diagonal_weights(one_photon_state) -> np.ndarray:
    spectral = one_photon_state.spectral
    if hasattr(spectral, "weights"):
        return np.asarray(spectral.weights, dtype=float)
    raise ValueError("mixture simulation requires a frequency-diagonal spectral sector")


def _resolve_grids(
    state: TwoPhotonState,
    spatial_grid: Optional[SpatialGrid],
    frequency_grid: Optional[FrequencyGrid],
) -> Tuple[SpatialGrid, FrequencyGrid]:
    if spatial_grid is None:
        spatial_grid = state.spatial.grid
    if frequency_grid is None:
        if isinstance(state.spectral, AntiCorrelated):
            frequency_grid = default_frequency_grid(state.spectral.density)
        else:
            frequency_grid = state.spectral.grid
    return spatial_grid, frequency_grid


# ---------------------------------------------------------------------------
# scan driver


def _thread_count() -> int:
    raw = os.environ.get("BIPHOTON_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"BIPHOTON_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ValueError("BIPHOTON_THREADS must be >= 0")
    if n == 0:
        return min(os.cpu_count() or 1, 8)
    return n


def oracle_scan(
    state: TwoPhotonState,
    cfg: InterferometerConfig,
    tau_start: float,
    tau_stop: float,
    tau_step: float,
    spatial_grid: Optional[SpatialGrid] = None,
    frequency_grid: Optional[FrequencyGrid] = None,
    convention: str = SYMMETRIC,
) -> Interferogram:
    """Delay scan evaluated entirely by the discrete-mode simulator.

    Delay points are independent; they may be evaluated concurrently
    (BIPHOTON_THREADS caps the pool, 0 = auto) and are always assembled in
    delay order, so output is deterministic.
    """
    sgrid, fgrid = _resolve_grids(state, spatial_grid, frequency_grid)
    initial = build_initial_state(state, sgrid, fgrid)
    tau = tau_axis(tau_start, tau_stop, tau_step)

    def evaluate(t: float) -> Tuple[float, float, float]:
        final = apply_pipeline(initial, build_pipeline(cfg, t, convention))
        return (singles_rate(final, "c"),
                singles_rate(final, "d"),
                coincidence_rate(final))

    workers = _thread_count()
    if workers > 1 and tau.size > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(evaluate, tau))
    else:
        rows = [evaluate(t) for t in tau]
    s1, s2, cc = (np.array(col) for col in zip(*rows))
    return Interferogram(
        tau=tau,
        singles_port1=s1,
        singles_port2=s2,
        coincidences=cc,
        config=cfg.describe(),
        state=state.describe(),
        engine="oracle",
    )
