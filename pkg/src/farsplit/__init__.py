"""farsplit: far fields of well-separated 2-D Helmholtz sources.

Synthesize superposed far fields, split them into per-source components,
restore missing angular segments, and evaluate the stability and
conditioning bounds that certify the solvers.
"""

from .bessel import bessel_j, bessel_j_asymptotic, bessel_j_prime
from .bounds import (
    BoundData,
    BoundGeometry,
    BoundReport,
    TheoremId,
    evaluate_bound,
    krasikov_check,
    verify_uncertainty,
)
from .farfield import (
    AngularGrid,
    ArcMask,
    CoeffWindow,
    FarField,
    inner,
    l0_support,
    lp_norm,
    restrict,
    translate,
    translate_via_coefficients,
)
from .picard import (
    PicardSpectrum,
    PowerBudget,
    asymptote,
    decay_bound,
    default_truncation_order,
    picard_threshold,
    spectrum,
    squared_singular_value,
)
from .split_l1 import L1Config, fista_split, soft_threshold, split_with_residual_target
from .split_ls import (
    GalerkinSystem,
    SingularSystemError,
    SplitGeometry,
    SplitSolution,
    assemble,
    completed_farfield,
    project_component,
    project_mask,
    solve,
    subspace_conditioning,
)
from .synth import (
    ModalGenerator,
    PointGenerator,
    Scene,
    SourceComponent,
    StripGenerator,
    minimal_power,
    modal_farfield,
    random_modal_component,
    scene_farfield,
    strip_farfield,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
