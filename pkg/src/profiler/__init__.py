"""Single-node data-pattern profiler.

Discovers and validates functional dependencies (exact and approximate),
metric dependencies, unary inclusion dependencies, association rules and
per-column statistics over CSV datasets, and runs them through a task
engine with a CLI and an HTTP API.
"""

from .dataset import (
    Column,
    ColumnType,
    NullMode,
    StrippedPartition,
    Table,
    build_pli,
    build_pli_for_set,
    infer_types,
    intersect_pli,
    parse_csv,
    parse_csv_text,
    serialize_csv,
)
from .fd import (
    Fd,
    FdDiscoveryConfig,
    FdValidationReport,
    ViolationCluster,
    discover_fds,
    fd_error,
    validate_fd,
)
from .mfd import MfdCluster, MfdMetric, MfdPoint, MfdQuery, validate_mfd
from .ind import ColumnRef, Ind, discover_unary_inds, validate_ind
from .arm import (
    ItemsetResult,
    Rule,
    TransactionSet,
    derive_rules,
    load_transactions,
    mine_frequent_itemsets,
)
from .stats import ColumnStats, profile_table
from .pipeline import (
    FixDecision,
    TypoCandidateCluster,
    TypoPipelineConfig,
    apply_fixes,
    find_typo_candidates,
)

__version__ = "0.1.0"
