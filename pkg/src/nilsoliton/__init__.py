"""Toolkit for deciding whether nilpotent Lie algebras admit nilsoliton
metrics (equivalently, are nilradicals of rank-one Einstein solvmanifolds):
curvature and moment-map computation, the linear Einstein test, gradient
flow on the sphere, stratum certificates, and exact graph positivity."""

from .brackets import (
    Bracket,
    BracketError,
    ValidationReport,
    WeightSupport,
    ZeroBracketError,
    act,
    act_diagonal,
    center,
    central_series,
    derived,
    inner,
    validate,
    weight_support,
)
from .curvature import (
    RicciData,
    diagonal_moment_projection,
    ricci,
    ricci_diagonal_sufficient,
    two_step_center_check,
)
from .flow import (
    FlowOptions,
    FlowTrajectory,
    classify_limit,
    grad_F,
    integrate,
    trajectory_csv,
)
from .graphs import (
    Graph,
    GraphError,
    Weighting,
    forbidden_witness,
    graph_einstein_nilradical,
    grst,
    grst_is_positive,
    is_positive,
    line_graph,
    payne_graph_matrix,
    to_bracket,
    tree_valency_hypothesis,
    weighting,
)
from .soliton import (
    EigenvalueType,
    PayneResult,
    PayneSolution,
    SolitonReport,
    derivation_space,
    eigenvalue_type,
    is_einstein,
    payne_matrix,
    payne_solve,
    payne_test,
    soliton_derivation,
    symmetric_derivation_space,
)
from .stratify import (
    LimitDivergesError,
    MccResult,
    StratumReport,
    beta_of,
    certify_stratum,
    diagonal_limit,
    in_W_beta,
    mcc,
    to_chamber,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
