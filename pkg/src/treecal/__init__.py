"""Multi-dimensional online calibration via tree-structured forecasting.

The package provides:

- ``geometry``: convex domains (simplex, l1/l2 balls, boxes), norms, and the
  base-H round indexing shared by the tree algorithms;
- ``scoring``: convex regularizers, Bregman divergences, and proper-scoring
  identities;
- ``metrics``: exact calibration error (plain, squared, Bregman, labeled,
  pure) and full swap regret, with brute-force audits on small instances;
- ``engine``: the TreeCal forecaster, the generic TreeSwap meta-algorithm
  with Follow-The-Leader / Be-The-Leader subroutines, and the blocked
  sampling variant for pure predictions;
- ``adversaries``: deterministic and seeded outcome streams;
- ``reductions``: best-response reduction from calibration to swap regret
  and the l1-ball/simplex embedding;
- ``harness``: seeded experiment runner with CSV/JSON reports, parameter
  sweeps, and an invariant verification suite (also exposed as the
  ``treecal`` command line).
"""

from .adversaries import (
    Constant,
    DriftingMean,
    FarthestVertex,
    IidDirichlet,
    IidVertices,
    VertexCycle,
    make_adversary,
    materialize,
)
from .engine import (
    AssignmentEvent,
    BeTheLeader,
    FollowTheLeader,
    IntervalLoss,
    NodeRecord,
    SampleRun,
    TreeCal,
    TreeSwapRun,
    btl_action,
    dump_trace,
    ftl_action,
    node_external_regret,
    run_forecaster,
    sample_treecal_run,
    treeswap_run,
)
from .errors import (
    BoundsError,
    ConfigError,
    DomainError,
    ProtocolError,
    TreecalError,
    UnsupportedCombination,
)
from .geometry import (
    Box,
    Domain,
    L1Ball,
    L2Ball,
    Norm,
    Simplex,
    base_point,
    diameter,
    digits_base_h,
    dual_norm,
    interval_of,
    norm_value,
    round_from_digits,
)
from .metrics import (
    BregmanDistance,
    Forecast,
    NormDistance,
    PureTranscript,
    SquaredNormDistance,
    Transcript,
    calibration_error,
    conditional_means,
    dump_transcript,
    load_transcript,
    max_realized_loss,
    pure_calibration_error,
    swap_regret_bregman,
    swap_regret_finite,
)
from .reductions import (
    ReductionReport,
    best_response,
    best_response_index,
    calibrated_to_swap,
    embed_l1ball_to_simplex,
    finite_menu,
    project_simplex_to_l1ball,
    project_transcript_to_l1ball,
)
from .scoring import (
    Regularizer,
    bregman,
    center_regularizer,
    euclidean,
    mixture_minimizer,
    negative_entropy,
    scale_regularizer,
    strong_convexity_probe,
)

__version__ = "0.1.0"
