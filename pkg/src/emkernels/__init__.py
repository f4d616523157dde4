"""Electromagnetic potential and field kernels for shape and stroke analysis."""

__version__ = "0.1.0"

from ._validation import (
    BudgetExceededError,
    EMKernelError,
    FormatError,
    InvalidInputError,
    InvalidSpecError,
)
from .kernels import (
    KernelSpec,
    PotentialKernel,
    build_kernel,
    complex_dipole_kernel,
    derivative_kernels,
    dipole_kernels,
    distance_grid,
    monopole_kernel,
)
from .fields import (
    FieldMap,
    GaussReport,
    MagneticResult,
    check_gauss_closure,
    convolve_same,
    density_factor,
    electric_field,
    electric_potential,
    field_from_potential,
    magnetic_potential,
)
from .oracle import Dipole, PointCharge, brute_force_dipole_potential, brute_force_potential
from .shapes import (
    DEFAULT_THRESHOLDS,
    RegionSet,
    ThresholdTable,
    detect_regions,
    extract_contour,
    grow_region,
    on_contour_values,
    percentile_band,
)
from .strokes import (
    OrientationMap,
    StrokeSet,
    magnetize_stroke,
    resolve_attraction,
    resolve_repulsion,
    split_substrokes,
    stroke_orientation,
    stroke_signature,
    thin,
)
from .estimators import ElectricField, ElectricPotential, RegionDetector, StrokeMagnetizer
