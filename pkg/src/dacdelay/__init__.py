"""Delay analysis and simulation for distributed average tracking.

A library plus command-line tool answering, for the standard
average-consensus tracker on a strongly connected, weight-balanced
digraph with a fixed communication delay:

* how much delay the network tolerates (continuous-time bound and the
  discrete-time integer bound, plus cheap degree-based bounds),
* how fast disagreement decays inside the admissible range (Lambert-W
  rates, certified geometric envelopes),
* how large the steady tracking error can get for time-varying inputs,
* and whether simulated trajectories actually behave as predicted
  (method-of-steps integrator, delayed difference recursion, independent
  closed-form cross-checks, a self-test suite).
"""

from .bounds import (
    AlgorithmParams,
    CtDelayReport,
    DtAdmissibleDelay,
    DtDelayReport,
    EnvelopeCertificate,
    build_augmented,
    build_ct_report,
    build_dt_report,
    ct_admissible_delay,
    ct_decay_rate,
    ct_degree_bound,
    ct_envelope_gain,
    ct_rightmost_root,
    ct_tracking_bound,
    dt_admissible_delay,
    dt_degree_bound,
    dt_envelope,
    dt_envelope_certificate,
    dt_stepsize_range,
    dt_tracking_bound,
    gamma_region_contains,
)
from .errors import (
    DelayInadmissibleError,
    GraphStructureError,
    InputFormatError,
    NumericalError,
    ParameterError,
    ToolkitError,
)
from .graph import (
    Digraph,
    StructureReport,
    chorded_ring_graph,
    complete_graph,
    disagreement_basis,
    laplacian,
    load_graph,
    parse_edge_list,
    path_graph,
    projector,
    read_edge_list,
    ring_graph,
    validate,
)
from .lambertw import lambert_w, w0_series
from .signals import (
    ArctanRamp,
    Constant,
    Ramp,
    SampledHold,
    Signal,
    Sinusoid,
    Sum,
    constant_catalog,
    sample_derivatives,
    sample_values,
    sampled_hold_catalog,
    smooth_catalog,
)
from .sim import (
    Trajectory,
    classify_stability,
    delayed_exponential,
    dt_trajectory_formula,
    signal_variation_gamma,
    simulate_ct,
    simulate_dt,
    tracking_error,
)
from .spectral import Spectrum, eig_general, eig_symmetric, is_schur, spectral_radius
from .verify import CheckResult, check_names, run_all

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ToolkitError",
    "InputFormatError",
    "GraphStructureError",
    "ParameterError",
    "DelayInadmissibleError",
    "NumericalError",
    # graph
    "Digraph",
    "StructureReport",
    "load_graph",
    "parse_edge_list",
    "read_edge_list",
    "validate",
    "laplacian",
    "disagreement_basis",
    "projector",
    "ring_graph",
    "chorded_ring_graph",
    "complete_graph",
    "path_graph",
    # spectral
    "Spectrum",
    "eig_general",
    "eig_symmetric",
    "spectral_radius",
    "is_schur",
    # lambert
    "lambert_w",
    "w0_series",
    # signals
    "Signal",
    "Constant",
    "Sinusoid",
    "Ramp",
    "ArctanRamp",
    "Sum",
    "SampledHold",
    "smooth_catalog",
    "sampled_hold_catalog",
    "constant_catalog",
    "sample_values",
    "sample_derivatives",
    # sim
    "Trajectory",
    "simulate_ct",
    "simulate_dt",
    "delayed_exponential",
    "dt_trajectory_formula",
    "tracking_error",
    "classify_stability",
    "signal_variation_gamma",
    # bounds
    "AlgorithmParams",
    "CtDelayReport",
    "DtDelayReport",
    "DtAdmissibleDelay",
    "EnvelopeCertificate",
    "ct_admissible_delay",
    "ct_degree_bound",
    "ct_decay_rate",
    "ct_envelope_gain",
    "ct_rightmost_root",
    "ct_tracking_bound",
    "dt_stepsize_range",
    "dt_admissible_delay",
    "dt_degree_bound",
    "gamma_region_contains",
    "build_augmented",
    "dt_envelope",
    "dt_envelope_certificate",
    "dt_tracking_bound",
    "build_ct_report",
    "build_dt_report",
    # verify
    "CheckResult",
    "run_all",
    "check_names",
]
