"""Exact computations with countable subgroups of Euclidean space.

Groups are generated by vectors whose coordinates are rational functions of
named real constants.  The package computes closures, compact generating
sequences with checkable certificates, intersections with subspaces, and
generic constructions in the plane driven by fresh constants.
"""

from .closure import ClosureDecomposition, decompose, dense_part, dense_witnesses, lattice_part
from .compactgen import (
    CompactGenCertificate,
    Verdict,
    compactgen,
    compactgen_R,
    compactgen_Rm,
    compactgen_Romega,
    verify_certificate,
)
from .errors import (
    BudgetExceeded,
    DivisionByZero,
    EucGroupsError,
    FileFormatError,
    LineMeetsGroup,
    NonlinearCoordinate,
    NotInGroup,
    RankDeficient,
    RealizationPole,
    ScalarSyntaxError,
    SupportExceeded,
)
from .generic import GenericGroup, LineSpec, affine_line_meet, density_report, extend_discrete, line_meet, make_generic
from .groups import FgGroup, StreamedGroup, enumerate_ball, flatten, independence_check, member, sup_norm, sup_norm_prefix
from .intersect import IntersectionResult, SubspaceSpec, decide_discrete, intersect_subspace
from .scalars import Constant, ConstantBasis, ExactScalar, compare, evaluate, parse_scalar

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
