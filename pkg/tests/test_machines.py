import random

import pytest

from cdsim import fixtures
from cdsim.errors import MachineMismatch, MachineSpecError, SymbolOutOfAlphabet
from cdsim.machines import (Configuration, canonicalize, compose_witness, dump_machine, find_periodic,
                            identity, identity_witness, machine_run, parse_machine, plus, slowdown_machine,
                            slowdown_witness, tm_step, unary, verify_witness)

from oracles import dict_tm_run, orbit_period


def cfg(text, tm):
    return Configuration.parse(text, tm.states)


def test_inc2_single_steps():
    tm = fixtures.inc2()
    assert tm_step(tm, cfg("q0 1101", tm)) == cfg("0 q0 101", tm)
    assert tm_step(tm, cfg("0 q0 0 1", tm)) == cfg("0 qh 1 1", tm)


def test_halt_state_is_fixed():
    tm = fixtures.inc2()
    c = cfg("01 qh 1", tm)
    assert tm_step(tm, c) == c
    assert machine_run(tm, c, 5) == (c, 0, True)


def test_run_inc2_to_halt():
    tm = fixtures.inc2()
    c, steps, halted = machine_run(tm, cfg("q0 11_", tm), 100)
    assert (steps, halted) == (3, True)
    assert c.tape() == "001"


def test_zero_steps_is_identity():
    tm = fixtures.inc2()
    c = cfg("q0 11", tm)
    assert machine_run(tm, c, 0) == (c, 0, False)


def test_plus_appends_one():
    c, steps, halted = machine_run(plus(), unary(3), 1)
    assert c == unary(4) and steps == 1 and not halted


def test_unknown_symbol():
    tm = fixtures.inc2()
    with pytest.raises(SymbolOutOfAlphabet):
        tm_step(tm, Configuration((), "q0", ("7",)))


def test_canonicalization_idempotent():
    rng = random.Random(5)
    for _ in range(10_000):
        left = tuple(rng.choice("01_") for _ in range(rng.randint(0, 4)))
        right = tuple(rng.choice("01_") for _ in range(rng.randint(0, 4)))
        c = Configuration(left, "q0", right)
        assert canonicalize(canonicalize(c)) == canonicalize(c) == c


def test_agrees_with_dict_tape_oracle():
    for tm in (fixtures.inc2(), fixtures.walker(), fixtures.plus_tm()):
        for c in tm.configurations(3):
            if c.left:
                continue
            tape = "".join(c.right)
            cur = c
            for n in range(8):
                state, cells, head = dict_tm_run(tm.delta, tm.halt, c.state, tape, n)
                assert cur.state == state
                assert cur.head == cells.get(head, "_")
                cur = tm_step(tm, cur)


def test_find_periodic():
    ident5 = identity(5)
    assert find_periodic(ident5, 5, 3) == {(unary(n), 1) for n in range(1, 6)}
    assert find_periodic(plus(), 6, 6) == set()
    ff = fixtures.flip_flop()
    got = find_periodic(ff, 3, 4, include_halting=False)
    assert got and all(p == 2 for _, p in got)
    want = {(c, orbit_period(lambda d: tm_step(ff, d), c, 4)) for c in ff.configurations(3)
            if not ff.is_halted(c)}
    assert got == {(c, p) for c, p in want if p is not None}


def test_find_periodic_matches_hashing_oracle():
    for tm in (fixtures.inc2(), fixtures.walker()):
        got = find_periodic(tm, 3, 5)
        want = set()
        for c in tm.configurations(3):
            p = orbit_period(lambda d: tm_step(tm, d), c, 5)
            if p is not None:
                want.add((c, p))
        assert got == want


def test_parser_rejects_blank_writes():
    with pytest.raises(MachineSpecError):
        parse_machine("states: a, h\nalphabet: 0\nstart: a\nhalt: h\na,0 -> h,_,S\na,_ -> h,0,S\n")


def test_machine_text_roundtrip():
    tm = fixtures.walker()
    assert parse_machine(dump_machine(tm)) == tm


def test_identity_composition():
    tm = fixtures.inc2()
    _, w = slowdown_witness(tm, 2)
    c = compose_witness(identity_witness(w.outer), w)
    configs = list(tm.configurations(3))
    for s in configs:
        assert c.encoder(s) == w.encoder(s)
        assert c.slowdown(c.encoder(s)) == w.slowdown(w.encoder(s))
    assert verify_witness(c, configs, 20) == []
    ii = compose_witness(identity_witness(tm), identity_witness(tm))
    assert all(ii.slowdown(s) == 1 and ii.decoder(s) == s for s in configs)


def test_slowdowns_compose_multiplicatively():
    tm = fixtures.inc2()
    slow3, inner = slowdown_witness(tm, 3)
    _, outer = slowdown_witness(slow3, 2)
    w = compose_witness(outer, inner)
    configs = list(tm.configurations(3))
    assert verify_witness(inner, configs, 20) == []
    assert verify_witness(outer, configs, 20) == []
    assert verify_witness(w, configs, 20) == []
    assert {w.slowdown(w.encoder(s)) for s in configs if not tm.is_halted(s)} == {6}


def test_compose_mismatch():
    a = identity_witness(fixtures.inc2())
    b = identity_witness(fixtures.walker())
    with pytest.raises(MachineMismatch):
        compose_witness(a, b)


def test_slowdown_machine_factor_one_is_same():
    tm = fixtures.inc2()
    assert slowdown_machine(tm, 1) is tm
