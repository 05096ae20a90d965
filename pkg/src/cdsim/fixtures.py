"""Small machines used by the tests, the CLI and the examples in the README."""
from __future__ import annotations

from .machines import BLANK, TuringMachine, parse_machine, recode_four_symbol

INC2 = """\
# binary increment, least significant bit first
states: q0, qh
alphabet: 0, 1
start: q0
halt: qh
q0,1 -> q0,0,R
q0,0 -> qh,1,S
q0,_ -> qh,1,S
"""

FLIP_FLOP = """\
# two states toggling the cell under the head forever
states: a, b, h
alphabet: 0, 1
start: a
halt: h
a,0 -> b,1,S
a,1 -> b,0,S
a,_ -> b,1,S
b,0 -> a,1,S
b,1 -> a,0,S
b,_ -> a,1,S
"""

WALKER = """\
# walks left rewriting 0 -> 2, 1 -> 0 and blanks -> 1; a 2 becomes 1 and halts one cell right
states: l, r
alphabet: 0, 1, 2
start: l
halt: r
l,0 -> l,2,L
l,1 -> l,0,L
l,2 -> r,1,R
l,_ -> l,1,L
"""

PLUS = """\
# unary successor: run to the right end and append a 1
states: q0, qh
alphabet: 1
start: q0
halt: qh
q0,1 -> q0,1,R
q0,_ -> qh,1,S
"""


def inc2() -> TuringMachine:
    return parse_machine(INC2)


def flip_flop() -> TuringMachine:
    return parse_machine(FLIP_FLOP)


def walker() -> TuringMachine:
    return parse_machine(WALKER)


def plus_tm() -> TuringMachine:
    return parse_machine(PLUS)


def identity_tm() -> TuringMachine:
    """Two states, both halting: the step map is the identity."""
    return TuringMachine(("p", "q"), ("0", "1", "2"), "p", {"p", "q"}, {})


def four_symbol_fixtures() -> dict:
    """Every fixture recoded over ``0, 1, 2`` with a power-of-two state set."""
    return {
        "inc2": recode_four_symbol(inc2()),
        "flip-flop": recode_four_symbol(flip_flop()),
        "walker": recode_four_symbol(walker()),
        "plus": recode_four_symbol(plus_tm()),
        "identity": identity_tm(),
    }


__all__ = ["BLANK", "inc2", "flip_flop", "walker", "plus_tm", "identity_tm", "four_symbol_fixtures"]
