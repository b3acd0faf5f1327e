"""Generalized Egyptian fractions: exact sumsets of sets locally cofinite at 0."""

from .dynamics import (
    DecreasingTrace,
    ElementStream,
    below_accumulation_census,
    extract_decreasing,
    find_accumulation_point,
)
from .errors import (
    BudgetExceeded,
    GroupMismatch,
    InvalidSpec,
    ParseError,
    SpecArityError,
    UnsupportedCapability,
    ZeroElement,
)
from .groups import GroupInstance, Ordering, lower_witness, make_integers, make_lex_pairs, make_rationals
from .lcf0 import (
    ArithmeticStream,
    GeometricStream,
    Lcf0Set,
    ListStream,
    WeightedSpec,
    finite_set,
    negate,
    union,
    unit_fractions,
    validate_lcf0,
    weighted,
)
from .sumset import (
    CensusReport,
    GapCertificate,
    Representation,
    SumSpec,
    SumsetNet,
    Trichotomy,
    Verdict,
    build_net,
    cover_soundness,
    enumerate_representations,
    find_gap,
    representation_census,
    trichotomy_check,
)

__version__ = "0.1.0"
