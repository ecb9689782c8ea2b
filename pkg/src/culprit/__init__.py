"""culprit: an iterative root-cause debugger for configurable pipelines.

Given past runs of a pipeline and a way to execute new configurations, it
searches for minimal definitive root causes of failures, expressed as boolean
formulas over (property, comparator, value) triples, and simplifies them into
concise explanations.
"""

from .debugger import (
    Budget,
    CauseStatus,
    DebugOptions,
    DebugReport,
    DebugStatus,
    Mode,
    confirm,
    debug,
    is_definitive,
    minimize,
)
from .executor import Direction, EvaluationSpec, ExecutorConfig, SubprocessRunner
from .model import (
    Comparator,
    Configuration,
    Conjunction,
    Explanation,
    Instance,
    Kind,
    Origin,
    Outcome,
    Predicate,
    Property,
    Universe,
    UniverseMismatchError,
    product_count,
    satisfies,
    satisfies_conj,
)
from .provenance import ProvenanceStore, read_log, write_log
from .simplify import simplify
from .tree import Leaf, Inner, Purity, Suspect, extract_suspects, fit

__version__ = "0.1.0"

__all__ = [
    "Budget",
    "CauseStatus",
    "Comparator",
    "Configuration",
    "Conjunction",
    "DebugOptions",
    "DebugReport",
    "DebugStatus",
    "Direction",
    "EvaluationSpec",
    "ExecutorConfig",
    "Explanation",
    "Inner",
    "Instance",
    "Kind",
    "Leaf",
    "Mode",
    "Origin",
    "Outcome",
    "Predicate",
    "Property",
    "ProvenanceStore",
    "Purity",
    "SubprocessRunner",
    "Suspect",
    "Universe",
    "UniverseMismatchError",
    "confirm",
    "debug",
    "extract_suspects",
    "fit",
    "is_definitive",
    "minimize",
    "product_count",
    "read_log",
    "satisfies",
    "satisfies_conj",
    "simplify",
    "write_log",
]
