"""Circular orders on free groups from ping-pong dynamics on the circle."""

from .freegroup import Alphabet, ReducedWord, ball, commutator, commutator_product
from .orders import (
    OrderTable,
    check_cocycle,
    compare_on_ball,
    complete_order,
    conjugate,
    from_left_order,
    materialize,
    midpoint_embed,
    order_from_action,
)
from .pingpong import (
    ConfigOracle,
    PingPongConfig,
    eval_triple,
    klift,
    preset,
    preset_schottky,
    preset_three_boundary,
    realize_moebius,
    realize_pl,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "ConfigOracle",
    "OrderTable",
    "PingPongConfig",
    "ReducedWord",
    "ball",
    "check_cocycle",
    "commutator",
    "commutator_product",
    "compare_on_ball",
    "complete_order",
    "conjugate",
    "eval_triple",
    "from_left_order",
    "klift",
    "materialize",
    "midpoint_embed",
    "order_from_action",
    "preset",
    "preset_schottky",
    "preset_three_boundary",
    "realize_moebius",
    "realize_pl",
    "validate",
]
