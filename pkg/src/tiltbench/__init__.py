"""Exact and certified computations with tilt stability data on surfaces and abelian threefolds."""

__version__ = "0.1.0"

from .errors import AdmissibilityError, CertificationError, PreconditionError, TiltError  # noqa: E402
from .lattice import (  # noqa: E402
    CharacterVector,
    FormalHN,
    PolarizedVariety,
    bogomolov_delta,
    euler_pairing,
    hn_sum,
    hn_truncate,
    minimal_rank,
    nabla_beta,
    semihomogeneous_character,
    twist,
)
from .surface import (  # noqa: E402
    LePotierModel,
    SheafDescriptor,
    SurfaceParams,
    WallLine,
    central_charge_surface,
    enumerate_walls,
    heart_position,
    lepotier_eval,
    normalize_surface_charge,
    wall_line,
)
from .threefold import (  # noqa: E402
    CubicData,
    ThreefoldParams,
    admissible,
    boundary_re_values,
    central_charge_3,
    ch3_at_roots,
    cubic_for_slope,
    hom_prediction_semihomog,
    im_sign_of_semihomog,
    linear_forms_L,
    normalize_threefold_charge,
    phase_gap_witness,
    phase_real,
    semihomog_window,
    tilt_slope,
    verify_dependence,
)
