"""gqlattice: expressive graph querying over in-memory property graphs.

Declare a query as entities plus parameterized rules, instantiate it into a
lattice of concrete query instances, translate instances to graph-query text,
execute them progressively with empty-result pruning, and aggregate results.
"""

from .graph import (
    AttrValue,
    GraphEdge,
    GraphFormatError,
    GraphNode,
    PropertyGraph,
    degree_index,
    load_graph,
    load_graph_file,
    serialize_graph,
)
from .model import (
    ChainingRule,
    ChainMode,
    CustomEntity,
    Diagnostic,
    EdgeAttrRule,
    EdgeEntity,
    EntityRef,
    IntRange,
    MotifConfigRule,
    MotifEntity,
    MotifKind,
    NodeAttrRule,
    NodeEntity,
    Op,
    Predicate,
    QueryRepresentation,
    RepeatingRule,
    Rule,
    assignments,
    classify_rules,
    validate,
)
from .dsl import QdslParseError, SourceSpan, parse, parse_with_diagnostics, serialize
from .motifs import MotifFragment, expand_motif, rooted_tree_shapes
from .pattern import Origin, PathMarker, PatternEdge, PatternGraph, PatternNode
from .instantiate import (
    InstantiationLattice,
    InvalidRepresentationError,
    LatticeCaps,
    LatticeSizeError,
    QueryInstance,
    Witness,
    build_backbone,
    build_lattice,
    executable_pattern,
    find_pattern_embedding,
    instantiate_fully_specified,
    lattice_to_json,
    verify_witness,
)
from .matcher import MatchOptions, MatchResult, MatchSetupError, count, match
from .translate import NotConcreteError, TranslatedQuery, translate
from .execute import (
    ExecutionState,
    FrequencyOverview,
    InstanceStatus,
    NotExecutedError,
    ResultGroup,
    UnknownStepError,
    aggregate,
    execute_step,
    group_results,
    propagate_pruning,
    state_to_json,
)

__version__ = "0.1.0"
