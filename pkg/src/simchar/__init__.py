"""Discrete differential characters on triangulated closed oriented manifolds
and the simplicial higher abelian gauge partition function."""

from .catalog import catalog
from .characters import (
    CharacterCoords,
    CharacterSpace,
    ModelReport,
    SparkTriple,
    grid_check,
    verify_model,
)
from .complexes import (
    SimplicialComplex,
    barycentric_subdivide,
    build_complex,
    perturbed_subdivide,
)
from .convergence import ExperimentPlan, run_convergence
from .gauge import (
    ActionSpec,
    GaugeFrames,
    ObservableSpec,
    fourier_zero_mode,
    gaussian_integral_im_delta,
    partition_function,
    partition_oracle,
    theta,
)
from .hodge import (
    HodgeFrame,
    build_frame,
    harmonic_integral_basis,
    restricted_determinant,
)
from .homology import HomologySummary, cocycle_lift, cohomology, homology
from .report import emit_report, parse_report, render_figures
from .snf import SnfResult, smith_normal_form
from .whitney import (
    Cochain,
    ComplexPair,
    WhitneyForm,
    de_rham_map,
    embed,
    inner_product,
    integrate,
    mass_matrix,
    whitney,
)

__version__ = "0.1.0"

__all__ = [
    "ActionSpec", "CharacterCoords", "CharacterSpace", "Cochain",
    "ComplexPair", "ExperimentPlan", "GaugeFrames", "HodgeFrame",
    "HomologySummary", "ModelReport", "ObservableSpec", "SimplicialComplex",
    "SnfResult", "SparkTriple", "WhitneyForm", "barycentric_subdivide",
    "build_complex", "build_frame", "catalog", "cocycle_lift", "cohomology",
    "de_rham_map", "embed", "emit_report", "fourier_zero_mode",
    "gaussian_integral_im_delta", "grid_check", "harmonic_integral_basis",
    "homology", "inner_product", "integrate", "mass_matrix",
    "parse_report", "partition_function", "partition_oracle",
    "perturbed_subdivide", "render_figures", "restricted_determinant",
    "run_convergence", "smith_normal_form", "theta", "verify_model",
    "whitney",
]
