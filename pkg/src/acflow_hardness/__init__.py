"""Lossless AC power-flow feasibility and the strong NP-hardness gadget."""

from .bounds import BoundCertificate, verify_bounds
from .cnf import CnfInstance, brute_force_sat, parse_cnf, verify_one_in_three
from .gadget import (
    B_CONSTANTS,
    BState,
    Mode,
    b_network,
    b_operating_point,
    classify_mode,
    conservation_residuals,
    delta_deriv,
    delta_fn,
    identity_check,
    mode_throughput_range,
    solve_manifold,
    throughput_b,
)
from .network import (
    Bus,
    BusKind,
    FeasibilityReport,
    Line,
    Network,
    OperatingPoint,
    check_feasible,
    flow_from_angles,
    residuals,
    throughput,
)
from .reduction import (
    REDUCTION_CONSTANTS,
    DecodeReport,
    ThroughputInstance,
    compile_instance,
    decode_witness,
    encode_witness,
    super_source_transform,
)

__version__ = "0.1.0"
