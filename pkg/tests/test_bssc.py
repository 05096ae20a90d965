import random
from fractions import Fraction as Fr

import pytest

from cdsim.bssc import (BIT0, BIT1, SEP, decoder_program, encoder_program, eval_expr, initial_state,
                        layout_word, linear_fit, measure_complexity, parse_expr, parse_program, run_decoder,
                        run_encoder, unbounded_decoder_program, vm_run, vm_step, word_layout)
from cdsim.codec import decode_bits, encode_bits
from cdsim.errors import DivisionByZero, GapPoint, NoGuardMatches, ProgramSyntaxError, StepCapExceeded
from cdsim.genshift import BiInfBits

ONE_RULE = """\
alphabet: 2
start: go
halt: halt
state go:
  if true -> x := 1; move R,S; goto halt
"""

SIGN = """\
alphabet: 2
registers: r
start: test
halt: neg, pos
state test:
  if x < 0 -> r := -1; goto neg
  if true -> r := 1; goto pos
"""

CONSTANT = """\
alphabet: 2
registers: i
start: a
state a:
  if i < 5 -> i := i + 1; goto a
  if true -> goto halt
"""


def _random_bits(rng, n=8):
    left = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, n)))
    right = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, n)))
    return BiInfBits(left, right)


# ------------------------------------------------------------ expressions

def test_expressions_are_exact():
    env = {"u": Fr(1, 3), "v": Fr(-2)}
    assert eval_expr(parse_expr("3*u - 2"), env) == -1
    assert eval_expr(parse_expr("u^2 + v**3"), env) == Fr(1, 9) - 8
    assert eval_expr(parse_expr("-(u + 1/6)/2"), env) == Fr(-1, 4)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        eval_expr(parse_expr("1/(u - u)"), {"u": Fr(1)})


def test_syntax_errors():
    for bad in ["state a:\n  if true -> goto nowhere\n",
                "state a:\n  if x ?? 1 -> goto a\n",
                "state a:\n  if true -> y := 1; goto a\n",
                "if true -> goto halt\n",
                "registers: x\nstate a:\n  if true -> goto halt\n",
                "state a:\n  if true -> move Q,S; goto halt\n"]:
        with pytest.raises(ProgramSyntaxError):
            parse_program(bad)


# ------------------------------------------------------------------- steps

def test_halted_state_is_fixed():
    p = parse_program(ONE_RULE)
    s = vm_run(p).final
    assert vm_step(p, s) == s


def test_one_rule_program():
    res = vm_run(parse_program(ONE_RULE))
    assert res.real == {0: 1}
    assert res.final.rhead == 1 and res.state == "halt" and res.steps == 1


def test_sign_branch():
    p = parse_program(SIGN)
    assert vm_run(p, [Fr(-3, 2)]).state == "neg"
    assert vm_run(p, [Fr(0)]).state == "pos"


def test_step_count_increments_by_one():
    p = parse_program(CONSTANT)
    s = initial_state(p)
    for i in range(6):
        s = vm_step(p, s)
        assert s.steps == i + 1


def test_empty_program_returns_input():
    p = parse_program("alphabet: 3\nstart: halt\n")
    res = vm_run(p, [Fr(1, 7), 0, Fr(2)], [1, 2])
    assert (res.real, res.disc, res.steps) == ({0: Fr(1, 7), 2: 2}, {0: 1, 1: 2}, 0)


def test_no_guard_matches():
    p = parse_program("state a:\n  if x > 0 -> goto halt\n")
    with pytest.raises(NoGuardMatches):
        vm_run(p, [Fr(-1)])


def test_step_cap():
    p = parse_program("state a:\n  if true -> goto a\n")
    with pytest.raises(StepCapExceeded):
        vm_run(p, cap=100)


def test_constant_program():
    rep = measure_complexity(parse_program(CONSTANT), [((), [1] * n) for n in range(1, 10)])
    assert rep.linear_fit_ok and rep.slope == 0 and rep.intercept == 6


def test_linear_fit_rejects_bends():
    assert linear_fit([(1, 3), (2, 5), (3, 7)]).linear_fit_ok
    assert not linear_fit([(1, 3), (2, 5), (3, 8)]).linear_fit_ok
    assert not linear_fit([(1, 3), (1, 4)]).linear_fit_ok


# --------------------------------------------------------- shipped programs

def test_layout_word_roundtrip():
    rng = random.Random(5)
    for _ in range(50):
        b = _random_bits(rng)
        assert word_layout(layout_word(b)) == b
    assert layout_word(BiInfBits.from_strings("1", "01")) == [BIT0, BIT1, SEP, BIT1]


def test_encoder_on_single_one():
    (x, y), _ = run_encoder(BiInfBits((), (1,)))
    assert x == Fr(11, 18)
    assert (x, y) == encode_bits(BiInfBits((), (1,)))


def test_decoder_on_11_18():
    bits, res = run_decoder((Fr(11, 18), encode_bits(BiInfBits())[1]))
    assert res.state == "done"
    assert bits == BiInfBits((), (1,)) == decode_bits((Fr(11, 18), Fr(-1, 6)))


def test_programs_match_codec_on_random_points():
    rng = random.Random(11)
    for _ in range(200):
        b = _random_bits(rng)
        pt = encode_bits(b)
        got, _ = run_encoder(b)
        assert got == pt
        bits, _ = run_decoder(pt)
        assert bits == decode_bits(pt) == b


def test_decoder_rejects_gap_points():
    pt = (Fr(1, 2), Fr(-1, 6))
    with pytest.raises(GapPoint):
        decode_bits(pt)
    bits, res = run_decoder(pt)
    assert bits is None and res.state == "gap"


def test_encoder_steps_affine_in_input_size():
    inputs = [((), layout_word(BiInfBits((), (1,) * n))) for n in range(1, 65)]
    rep = measure_complexity(encoder_program(), inputs)
    assert rep.linear_fit_ok and rep.slope == 1 and rep.intercept == 4


def test_decoder_steps_affine_in_output_size():
    pts = [(list(encode_bits(BiInfBits((), (1,) * n))), ()) for n in range(1, 65)]
    rep = measure_complexity(decoder_program(), pts, mode="output")
    assert rep.linear_fit_ok and rep.slope == 2


def test_unbounded_decoder_is_not_linear():
    p = unbounded_decoder_program()
    # fixed output length 3, growing iteration count l
    inputs = [([Fr(1, 2 ** l), Fr(1, 8)], ()) for l in range(1, 30)]
    rep = measure_complexity(p, inputs, mode="output")
    assert not rep.linear_fit_ok
    assert all(len(vm_run(p, real).disc) == 3 for real, _ in inputs[:5])


def test_frame_property():
    rng = random.Random(17)
    for _ in range(40):
        b = _random_bits(rng, 6)
        pt = encode_bits(b)
        clean_bits, clean = run_decoder(pt)
        junk = {i: Fr(rng.randint(-50, 50), rng.randint(1, 9)) for i in range(3, 9)}
        res = vm_run(decoder_program(), {0: pt[0], 1: pt[1], **junk}, ())
        assert res.steps == clean.steps
        assert res.disc == clean.disc
        word = layout_word(b)
        tail = {len(word) + 1 + i: rng.randint(1, 3) for i in range(4)}
        enc = vm_run(encoder_program(), {5: Fr(rng.randint(1, 9))}, {**dict(enumerate(word)), **tail})
        assert (enc.real[0], enc.real[1]) == pt
