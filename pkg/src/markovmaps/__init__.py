"""Exact analysis of piecewise-affine Markov multi-maps on the unit interval."""

from .coding import check_CC, compose_inverse, contraction_rate, equicontinuity_modulus, inverse_branch
from .core import (
    A0,
    A1,
    A2,
    ExactInterval,
    MarkovMultiMap,
    check_proper_parametrization,
    complete_parametrization,
    evaluate,
    graph_pieces,
    parse_spec,
    to_document,
    validate_definition,
)
from .dynamics import (
    classify,
    connect_witness,
    eventual_range,
    metric_d,
    periodic_witness,
    sample_forward,
    special_approximation,
    specification_witness,
)
from .fixtures import load_fixture
from .sft import build_transition_matrix, components, essential_alphabet, language
from .verdict import FAILS, HOLDS, UNKNOWN, Verdict

__version__ = "0.1.0"
