"""Curvature and stability analysis of Lie group homomorphisms with bi-invariant
metrics, cross-checked by an independent quadrature/finite-difference oracle."""

from ._kernels import backend, pairwise_sum, uniforms
from .curvature import (
    CurvatureConvention,
    RicciData,
    curvature_tensor,
    is_flat,
    levi_civita,
    ricci,
    ricci_via_trace,
    sectional,
    sectional_on_frame,
)
from .lie_core import (
    DEFAULT_TOL,
    AlgebraValidation,
    DegeneratePlaneError,
    LieAlgebra,
    Metric,
    MetricValidation,
    OrthonormalFrame,
    StructureError,
    ValidationFailure,
    bracket,
    center,
    direct_sum,
    killing_form,
    load_algebra,
    orthonormal_frame,
    registry,
    validate_algebra,
    validate_metric,
)
from .morphism import (
    Homomorphism,
    HomValidation,
    is_totally_geodesic,
    load_homomorphism,
    require_valid,
    second_fundamental_form,
    tension,
    validate_hom,
)
from .oracle import (
    GroupRealization,
    ProductRealization,
    SU2Realization,
    SampledField,
    TorusRealization,
    builtin_field,
    energy_density,
    energy_quadrature,
    haar_samples,
    second_variation_fd,
    variation_energy,
)
from .variation import (
    StabilityReport,
    Verdict,
    index_theorem_density,
    nabla2_pushforward_direct,
    nabla2_pushforward_paperchain,
    smith_index_density,
    stability_report,
    weitzenboeck_S,
)

__version__ = "0.1.0"
