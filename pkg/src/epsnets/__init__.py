"""Linear-size epsilon-nets for halfspace ranges in 2D and 3D.

Exact-arithmetic construction and verification: a greedy maximal family of
medium-size traces with per-member subnets yields nets of size O(1/eps),
certified against a complete canonical-trace oracle; envelope and
dual-arrangement diagnostics validate the counting arguments behind the
size bound.
"""

from .builder import (
    BaselineResult,
    BuildConfig,
    Family,
    NetReport,
    baseline_hw_net,
    build_family,
    build_net,
    build_subnet,
    hitting_net,
)
from .errors import DegeneracyError, RetryLimitError, VerificationError
from .geometry import (
    Halfspace,
    Hyperplane,
    Point,
    dualize,
    orientation,
    side_of,
    validate_general_position,
)
from .instances import Instance, elekes_demo, generate, load_instance, save_instance
from .pipeline import PipelineConfig, PipelineTrace, run_pipeline
from .ranges import (
    RangeTrace,
    TraceEnumerator,
    Verdict,
    depth,
    enumerate_canonical_traces,
    subnet_oracle,
    verify_net,
)

__all__ = [
    "BaselineResult",
    "BuildConfig",
    "DegeneracyError",
    "Family",
    "Halfspace",
    "Hyperplane",
    "Instance",
    "NetReport",
    "PipelineConfig",
    "PipelineTrace",
    "Point",
    "RangeTrace",
    "RetryLimitError",
    "TraceEnumerator",
    "Verdict",
    "VerificationError",
    "baseline_hw_net",
    "build_family",
    "build_net",
    "build_subnet",
    "depth",
    "dualize",
    "elekes_demo",
    "enumerate_canonical_traces",
    "generate",
    "hitting_net",
    "load_instance",
    "orientation",
    "run_pipeline",
    "save_instance",
    "side_of",
    "subnet_oracle",
    "validate_general_position",
    "verify_net",
]
