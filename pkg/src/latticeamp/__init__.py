"""Lattice-reduction aided vector perturbation precoding with AMP refinement.

Library layout:

- linalg: dense primitives, QR, pseudo-inverse, lattice quality metrics
- reduction: LLL / boosted LLL / KZ / boosted KZ with unimodular tracking
- enumeration: exact sphere-decoder CVP/SVP oracles with flop accounting
- estimators: ZF / SIC / LMMSE decoders and energy-efficiency bounds
- amp: threshold functions, the AMP iteration, state evolution, fixed points
- vpsim: vector-perturbation Monte Carlo (SER sweeps, error histograms, flops)
- mimo: massive-MIMO uplink detection experiments
- cli: the `latticeamp` command exposing every experiment as a subcommand
"""

from .errors import (
    DegenerateInputError,
    DimensionTooLargeError,
    InvalidDimensionError,
    IterationLimitError,
    LatticeAmpError,
    NoConvergenceError,
    NonFiniteError,
    RadiusTooSmallError,
    RankDeficientError,
)
from .linalg import (
    LatticeBasis,
    QrFactors,
    coherence,
    gram_determinant,
    load_matrix,
    orthogonality_defect,
    pseudo_inverse,
    qr_decompose,
    round_half_away,
    round_half_away_int,
    save_matrix,
    small_factor,
)
from .reduction import (
    ReductionMethod,
    ReductionOutcome,
    bkz_boosted_reduce,
    blll_reduce,
    int_det,
    kz_reduce,
    lll_reduce,
    od_bound,
    reduce_basis,
    size_reduce,
    unimodular_completion,
    verify_bkz_boosted,
    verify_diagonal_reduced,
    verify_kz,
    verify_lll,
    verify_size_reduced,
)
from .enumeration import (
    CvpInstance,
    EnumStats,
    babai_nearest_plane,
    shortest_vector,
    sphere_cvp,
    successive_minima,
)
from .estimators import (
    EfficiencyBoundQuery,
    efficiency_bound,
    lmmse_decode,
    measure_efficiency,
    sic_decode,
    zf_decode,
)
from .amp import (
    AmpConfig,
    AmpTrace,
    PriorModel,
    SeTrace,
    amp_solve,
    empirical_state_evolution,
    estimate_column_variances,
    eta_discrete_gaussian,
    eta_gaussian,
    eta_ternary,
    find_highest_fixed_point,
    gaussian_fixed_point_bounds,
    kappa_discrete_gaussian,
    kappa_gaussian,
    kappa_ternary,
    moment_matched_start,
    psi,
    state_evolution,
)
from .vpsim import (
    AlgorithmSpec,
    ErrorHistogram,
    PrecodeResult,
    SerCurve,
    SerPoint,
    TrialRecord,
    VpScenario,
    amp_flops,
    build_cvp,
    error_distance_study,
    flop_report,
    generate_channel,
    hybrid_precode,
    run_ser_sweep,
    sic_flops,
    simulate_trial,
    transmit_and_recover,
    vp_algorithm,
    zf_flops,
)
from .mimo import (
    DetectScenario,
    DetectorSpec,
    NaturalReductionReport,
    constellation_power,
    detection_error_study,
    detector,
    natural_reduction_check,
    noise_var_for_snr,
    run_detection_sweep,
    run_detector,
)

__version__ = "0.1.0"
