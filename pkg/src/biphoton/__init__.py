"""Simulation and analysis of two-photon Mach-Zehnder interference.

Photon pairs from collinear degenerate down-conversion enter one input
port of a Mach-Zehnder interferometer, either balanced (equal mirror
parity in both arms) or mirror-unbalanced (one arm applies a transverse
flip x -> -x).  The package evaluates singles and coincidence
interferograms two independent ways -- closed forms and a brute-force
discrete-mode simulator -- and extracts visibilities, fringe periods and
dip widths from the scans.
"""

from .errors import (
    AsymmetricSpectrum,
    BiphotonError,
    BudgetExceeded,
    EmptyOrNegative,
    GridAsymmetry,
    GridMismatch,
    IncompletePipeline,
    NoDip,
    NoFringe,
    NonParityPump,
    NotPositive,
    UnderResolved,
    UnderSampled,
    UnknownElement,
    ZeroDensity,
)
from .spectral import (
    EnvelopeEvaluator,
    FrequencyGrid,
    Gaussian,
    Rectangular,
    SpectralDensity,
    Tabulated,
    default_frequency_grid,
    envelope_first_order,
    envelope_second_order,
    normalize,
)
from .spatial import (
    ParityOverlap,
    SpatialAmplitude,
    SpatialDensityOperator,
    SpatialGrid,
    default_spatial_grid,
    eigendecompose,
    flip_overlap,
    gaussian_amplitude,
    hermite_gauss1_amplitude,
    parity_decompose,
    pump_parity_overlap,
)
from .states import (
    AntiCorrelated,
    CorrelatedPump,
    DiagonalDensity,
    GeneralDensity,
    GeneralSpatial,
    GeneralSpectral,
    OnePhotonState,
    TwoPhotonState,
    default_spdc_state,
    reduce_to_one_photon,
    reduced_spatial_operator,
)
from .interferometer import (
    Interferogram,
    InterferometerConfig,
    MZI,
    MZIM,
    g2_mzi,
    g2_mzim,
    intensity_mzi,
    intensity_mzim,
    scan,
)
from .modesim import (
    BeamSplitter,
    Branch,
    BranchSumState,
    Delay,
    DenseTensorState,
    RelabelOutputs,
    SpatialFlip,
    apply_element,
    apply_pipeline,
    build_initial_state,
    build_pipeline,
    coincidence_rate,
    oracle_scan,
    simulate_mixture,
    singles_rate,
    to_dense,
    total_norm,
)
from .analysis import (
    VisibilityReport,
    fringe_period,
    hom_dip_fwhm,
    report,
    visibility,
)

__version__ = "0.1.0"
