"""Numerical laboratory for horocycle averages on geometrically finite hyperbolic surfaces."""

__version__ = "0.1.0"

from .geometry import (
    GeometryError,
    Isometry,
    PlanePoint,
    BoundaryPoint,
    INFINITY,
    ORIGIN,
    UnitTangent,
    mobius_apply,
    hyperbolic_distance,
    busemann,
    geodesic_flow,
    horocycle_flow,
    from_coordinates,
    frame_distance,
    same_leaf,
    hamenstadt_distance,
)
from .groups import (
    GroupError,
    Generator,
    Word,
    FuchsianGroup,
    ExponentFit,
    WordSpec,
    LimitSample,
    critical_exponent,
    check_parabolic_growth,
    sample_limit_point,
    tangent_from_samples,
    parse_group_text,
    parse_group_file,
    dumps_group,
    reset_word_counter,
    enumerated_word_count,
)
from .defaults import (
    schottky_group,
    cusped_group,
    unit_parabolic_group,
    resolve_group,
    BUILTIN_NAMES,
    KNOWN_EXPONENTS,
)
from .measures import (
    MeasureError,
    PattersonConfig,
    AtomicBoundaryMeasure,
    ConditionalHorocycleMeasure,
    build_patterson,
    conformality_defect,
    conditional_on_horocycle,
    horoball_mass,
    ps_integral,
    quadrature_report,
    br_integral,
)
from .averages import (
    AveragesError,
    HoroBall,
    TestFunction,
    ConstantFunction,
    ShiftedFunction,
    WeightedFunction,
    CuspHeightCap,
    HaarDensity,
    AverageSeries,
    pointed_frame,
    build_vector,
    average_ps,
    flow_commutation_residual,
    average_lebesgue,
    average_haar,
    ratio_series,
    mixing_series,
    mass_in_compact,
    periodic_closure,
)

__all__ = [
    "GeometryError",
    "Isometry",
    "PlanePoint",
    "BoundaryPoint",
    "INFINITY",
    "ORIGIN",
    "UnitTangent",
    "mobius_apply",
    "hyperbolic_distance",
    "busemann",
    "geodesic_flow",
    "horocycle_flow",
    "from_coordinates",
    "frame_distance",
    "same_leaf",
    "hamenstadt_distance",
    "GroupError",
    "Generator",
    "Word",
    "FuchsianGroup",
    "ExponentFit",
    "WordSpec",
    "LimitSample",
    "critical_exponent",
    "check_parabolic_growth",
    "sample_limit_point",
    "tangent_from_samples",
    "parse_group_text",
    "parse_group_file",
    "dumps_group",
    "reset_word_counter",
    "enumerated_word_count",
    "schottky_group",
    "cusped_group",
    "unit_parabolic_group",
    "resolve_group",
    "BUILTIN_NAMES",
    "KNOWN_EXPONENTS",
    "MeasureError",
    "PattersonConfig",
    "AtomicBoundaryMeasure",
    "ConditionalHorocycleMeasure",
    "build_patterson",
    "conformality_defect",
    "conditional_on_horocycle",
    "horoball_mass",
    "ps_integral",
    "quadrature_report",
    "br_integral",
    "AveragesError",
    "HoroBall",
    "TestFunction",
    "ConstantFunction",
    "ShiftedFunction",
    "WeightedFunction",
    "CuspHeightCap",
    "HaarDensity",
    "AverageSeries",
    "pointed_frame",
    "build_vector",
    "average_ps",
    "flow_commutation_residual",
    "average_lebesgue",
    "average_haar",
    "ratio_series",
    "mixing_series",
    "mass_in_compact",
    "periodic_closure",
    "__version__",
]
