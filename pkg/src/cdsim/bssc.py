"""Interpreter for hybrid real/discrete machines with exact rational arithmetic.

A program has named real registers, one real tape, one tape over Z_d and a
finite list of guarded commands per control state.  Guards are conjunctions of
polynomial sign conditions; updates are simultaneous assignments whose right
hand sides are rational expressions.  The variable ``x`` is the real cell under
the real head and ``c`` the discrete cell under the discrete head; assigning
to them writes the tape.  Blank is 0 on both tapes.

Program text::

    alphabet: 4
    registers: u, n
    start: scan
    halt: done
    state scan:
      if c = 1 and u >= 0 -> c := 0, u := u/3; move S,R; goto scan
      if true -> goto done

Shipped programs: the Cantor encoder and decoder (see :func:`layout_word` for
the discrete word format) and an unbounded-complexity decoder used as a
negative fixture.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import DivisionByZero, NoGuardMatches, ProgramSyntaxError, StepCapExceeded
from .genshift import BiInfBits


# ------------------------------------------------------------ expressions

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ProgramSyntaxError(f"cannot read {text[pos:]!r}")
        num, name, op = m.groups()
        out.append(("num", Fraction(int(num))) if num else ("name", name) if name else ("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, op=None):
        tok = self.peek()
        if op is not None and tok != ("op", op):
            raise ProgramSyntaxError(f"expected {op!r} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        e = self.sum()
        if self.i != len(self.toks):
            raise ProgramSyntaxError(f"trailing input in {self.text!r}")
        return e

    def sum(self):
        e = self.product()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            e = ("bin", op, e, self.product())
        return e

    def product(self):
        e = self.unary()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            e = ("bin", op, e, self.unary())
        return e

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise ProgramSyntaxError("exponents must be nonnegative integer literals")
            return ("pow", base, int(val))
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return ("num", val)
        if kind == "name":
            return ("var", val)
        if (kind, val) == ("op", "("):
            e = self.sum()
            self.take(")")
            return e
        raise ProgramSyntaxError(f"unexpected token {val!r} in {self.text!r}")


def parse_expr(text: str):
    return _Parser(text).parse()


def eval_expr(e, env: Mapping[str, Fraction]) -> Fraction:
    tag = e[0]
    if tag == "num":
        return e[1]
    if tag == "var":
        try:
            return env[e[1]]
        except KeyError:
            raise ProgramSyntaxError(f"unknown variable {e[1]!r}") from None
    if tag == "neg":
        return -eval_expr(e[1], env)
    if tag == "pow":
        return eval_expr(e[1], env) ** e[2]
    _, op, a, b = e
    a, b = eval_expr(a, env), eval_expr(b, env)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if b == 0:
        raise DivisionByZero("division by zero")
    return a / b


_RELATIONS = {
    ">=": lambda v: v >= 0, "<=": lambda v: v <= 0, "!=": lambda v: v != 0,
    ">": lambda v: v > 0, "<": lambda v: v < 0, "=": lambda v: v == 0,
}


# ------------------------------------------------------------------ program

@dataclass(frozen=True)
class Command:
    guard: tuple          # ((lhs - rhs expression, relation), ...); empty means true
    updates: tuple        # ((target, expression), ...)
    moves: tuple          # (real move, discrete move)
    target: str


@dataclass(frozen=True)
class HybridProgram:
    d: int
    registers: tuple
    start: str
    halt: frozenset
    states: Mapping       # state -> tuple of Command

    def is_halted(self, state: str) -> bool:
        return state in self.halt


def _parse_guard(text: str) -> tuple:
    text = text.strip()
    if text == "true":
        return ()
    out = []
    for atom in re.split(r"\band\b", text):
        m = re.match(r"(.*?)(>=|<=|!=|>|<|=)(.*)$", atom.strip())
        if not m:
            raise ProgramSyntaxError(f"cannot read condition {atom!r}")
        lhs, rel, rhs = m.groups()
        out.append((("bin", "-", parse_expr(lhs), parse_expr(rhs)), rel))
    return tuple(out)


def _parse_command(text: str) -> Command:
    m = re.match(r"if\s+(.*?)\s*->(.*)$", text)
    if not m:
        raise ProgramSyntaxError(f"cannot read command {text!r}")
    guard = _parse_guard(m.group(1))
    updates, moves, target = [], ("S", "S"), None
    for seg in m.group(2).split(";"):
        seg = seg.strip()
        if not seg:
            continue
        if seg.startswith("move"):
            parts = [p.strip().upper() for p in seg[4:].split(",")]
            if len(parts) != 2 or not set(parts) <= {"L", "R", "S"}:
                raise ProgramSyntaxError(f"bad move {seg!r}")
            moves = tuple(parts)
        elif seg.startswith("goto"):
            target = seg[4:].strip()
        else:
            for assign in seg.split(","):
                if ":=" not in assign:
                    raise ProgramSyntaxError(f"bad assignment {assign!r}")
                name, expr = assign.split(":=", 1)
                updates.append((name.strip(), parse_expr(expr)))
    if not target:
        raise ProgramSyntaxError(f"command without goto: {text!r}")
    return Command(guard, tuple(updates), moves, target)


def parse_program(text: str) -> HybridProgram:
    header = {}
    states = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("state ") and line.endswith(":"):
                current = line[6:-1].strip()
                states[current] = []
            elif line.startswith("if "):
                if current is None:
                    raise ProgramSyntaxError("command outside a state block")
                states[current].append(_parse_command(line))
            elif ":" in line:
                key, value = line.split(":", 1)
                header[key.strip()] = [v.strip() for v in value.split(",") if v.strip()]
            else:
                raise ProgramSyntaxError(f"cannot read {raw!r}")
        except ProgramSyntaxError as e:
            raise ProgramSyntaxError(f"line {lineno}: {e}") from None
    d = int(header.get("alphabet", ["2"])[0])
    start = header.get("start", [next(iter(states), "halt")])[0]
    halt = frozenset(header.get("halt", ["halt"]))
    registers = tuple(header.get("registers", []))
    for name in registers:
        if name in ("x", "c"):
            raise ProgramSyntaxError("x and c name the tape cells")
    for cmds in states.values():
        for cmd in cmds:
            if cmd.target not in states and cmd.target not in halt:
                raise ProgramSyntaxError(f"goto to unknown state {cmd.target!r}")
            for name, _ in cmd.updates:
                if name not in registers and name not in ("x", "c"):
                    raise ProgramSyntaxError(f"assignment to unknown register {name!r}")
    return HybridProgram(d, registers, start, halt, {k: tuple(v) for k, v in states.items()})


# ------------------------------------------------------------------- state

def _sparse(cells) -> dict:
    if isinstance(cells, Mapping):
        items = cells.items()
    else:
        items = enumerate(cells)
    return {int(i): v for i, v in items if v != 0}


@dataclass(frozen=True)
class VMState:
    state: str
    registers: Mapping
    real: Mapping = field(default_factory=dict)
    disc: Mapping = field(default_factory=dict)
    rhead: int = 0
    dhead: int = 0
    steps: int = 0


def initial_state(p: HybridProgram, real=(), disc=()) -> VMState:
    real = {i: Fraction(v) for i, v in _sparse(real).items()}
    disc = {i: int(v) for i, v in _sparse(disc).items()}
    for v in disc.values():
        if not 0 <= v < p.d:
            raise ProgramSyntaxError(f"discrete symbol {v} outside Z_{p.d}")
    return VMState(p.start, {r: Fraction(0) for r in p.registers}, real, disc)


_MOVE = {"L": -1, "R": 1, "S": 0}


def vm_step(p: HybridProgram, s: VMState) -> VMState:
    if p.is_halted(s.state):
        return s
    env = dict(s.registers)
    env["x"] = s.real.get(s.rhead, Fraction(0))
    env["c"] = Fraction(s.disc.get(s.dhead, 0))
    for cmd in p.states.get(s.state, ()):
        if all(_RELATIONS[rel](eval_expr(e, env)) for e, rel in cmd.guard):
            break
    else:
        raise NoGuardMatches(f"no guard of state {s.state!r} holds")
    values = [(name, eval_expr(e, env)) for name, e in cmd.updates]
    regs, real, disc = dict(s.registers), s.real, s.disc
    for name, v in values:
        if name == "x":
            real = dict(real)
            if v == 0:
                real.pop(s.rhead, None)
            else:
                real[s.rhead] = v
        elif name == "c":
            if v.denominator != 1 or not 0 <= v < p.d:
                raise ProgramSyntaxError(f"discrete write {v} outside Z_{p.d}")
            disc = dict(disc)
            if v == 0:
                disc.pop(s.dhead, None)
            else:
                disc[s.dhead] = int(v)
        else:
            regs[name] = v
    return VMState(cmd.target, regs, real, disc,
                   s.rhead + _MOVE[cmd.moves[0]], s.dhead + _MOVE[cmd.moves[1]], s.steps + 1)


@dataclass
class VMResult:
    real: dict
    disc: dict
    steps: int
    state: str
    final: VMState

    def disc_word(self) -> list:
        """Discrete tape from its leftmost to its rightmost non-blank cell."""
        if not self.disc:
            return []
        lo, hi = min(self.disc), max(self.disc)
        return [self.disc.get(i, 0) for i in range(lo, hi + 1)]


def vm_run(p: HybridProgram, real=(), disc=(), cap: int = 10 ** 6) -> VMResult:
    s = initial_state(p, real, disc)
    while not p.is_halted(s.state):
        if s.steps >= cap:
            raise StepCapExceeded(f"no halt within {cap} steps")
        s = vm_step(p, s)
    return VMResult(dict(s.real), dict(s.disc), s.steps, s.state, s)


# -------------------------------------------------------------- complexity

@dataclass
class ComplexityReport:
    samples: list            # (size, steps)
    linear_fit_ok: bool
    slope: Optional[Fraction]
    intercept: Optional[Fraction]


def linear_fit(samples: Sequence) -> ComplexityReport:
    """Exact affine fit: ok iff the step count is a function of the size and
    all points lie on one line."""
    by_size = {}
    for n, t in samples:
        by_size.setdefault(n, set()).add(t)
    if any(len(ts) > 1 for ts in by_size.values()):
        return ComplexityReport(list(samples), False, None, None)
    pts = sorted((n, next(iter(ts))) for n, ts in by_size.items())
    if len(pts) == 1:
        return ComplexityReport(list(samples), True, Fraction(0), Fraction(pts[0][1]))
    (n0, t0), (n1, t1) = pts[0], pts[-1]
    c = Fraction(t1 - t0, n1 - n0)
    d = t0 - c * n0
    ok = all(t == c * n + d for n, t in pts)
    return ComplexityReport(list(samples), ok, c if ok else None, d if ok else None)


def measure_complexity(p: HybridProgram, inputs: Iterable, mode: str = "input",
                       cap: int = 10 ** 6) -> ComplexityReport:
    """``inputs`` are ``(real, disc)`` pairs.  Size is the discrete input
    length (``mode="input"``) or the non-blank discrete output length
    (``mode="output"``)."""
    samples = []
    for real, disc in inputs:
        res = vm_run(p, real, disc, cap)
        size = len(list(disc)) if mode == "input" else len(res.disc)
        samples.append((size, res.steps))
    return linear_fit(samples)


# ---------------------------------------------------------- shipped programs

# Discrete word for a bit layout: the right bits s_0 s_1 ..., the separator,
# then the left bits s_-1 s_-2 ...  Symbols: 0 blank, 1 bit 0, 2 bit 1, 3 '.'.
BIT0, BIT1, SEP = 1, 2, 3

ENCODER_PROGRAM = """\
# Cantor encoder: reads the layout word, leaves (x, y) on real cells 0, 1
alphabet: 4
registers: ax, px, wx, ay, py, wy
start: init
halt: done
state init:
  if true -> px := 1/3, wx := 1/3, py := 1/3, wy := 1/3; goto right
state right:
  if c = 1 -> c := 0, px := px/3; move S,R; goto right
  if c = 2 -> c := 0, ax := ax + 2*px, wx := px/3, px := px/3; move S,R; goto right
  if c = 3 -> c := 0; move S,R; goto left
  if c = 0 -> goto emit
state left:
  if c = 1 -> c := 0, py := py/3; move S,R; goto left
  if c = 2 -> c := 0, ay := ay + 2*py, wy := py/3, py := py/3; move S,R; goto left
  if c = 0 -> goto emit
  if c = 3 -> c := 0; move S,R; goto left
state emit:
  if true -> x := ax - wx/2; move R,S; goto emit2
state emit2:
  if true -> x := ay - wy/2; move L,S; goto done
"""

DECODER_PROGRAM = """\
# Cantor decoder: reads (x, y) from real cells 0, 1, writes the layout word
# from discrete cell 0 and returns the head there; gap points end in 'gap'
alphabet: 4
registers: u, v, n
start: readx
halt: done, gap
state readx:
  if true -> u := x, x := 0; move R,S; goto ready
state ready:
  if true -> v := x, x := 0; move L,S; goto right
state right:
  if u <= 0 and u >= -1/3 -> c := 3, n := n + 1; move S,R; goto left
  if u > 0 and u <= 1/3 -> c := 1, u := 3*u, n := n + 1; move S,R; goto right
  if u >= 5/9 and u <= 1 -> c := 2, u := 3*u - 2, n := n + 1; move S,R; goto right
  if true -> goto gap
state left:
  if v <= 0 and v >= -1/3 -> move S,L; goto back
  if v > 0 and v <= 1/3 -> c := 1, v := 3*v, n := n + 1; move S,R; goto left
  if v >= 5/9 and v <= 1 -> c := 2, v := 3*v - 2, n := n + 1; move S,R; goto left
  if true -> goto gap
state back:
  if n > 1 -> n := n - 1; move S,L; goto back
  if true -> goto done
"""

# The system f(x, y) = (x/2, y) with E(s_n) = (1, 2^-n) and a decoder that
# reads l from x in [2^-l - 2^-(l+2), 2^-l] and n from y = 2^-n, then runs a
# machine for l steps before writing s_n.  Here the machine is the identity,
# so the output depends on n only while the running time grows with l.
UNBOUNDED_DECODER_PROGRAM = """\
alphabet: 2
registers: u, v, l
start: readx
halt: done
state readx:
  if true -> u := x, x := 0; move R,S; goto ready
state ready:
  if true -> v := x, x := 0; move L,S; goto count
state count:
  if u < 3/4 -> u := 2*u, l := l + 1; goto count
  if true -> goto run
state run:
  if l > 0 -> l := l - 1; goto run
  if true -> goto write
state write:
  if v < 1 -> c := 1, v := 2*v; move S,R; goto write
  if true -> goto done
"""


def encoder_program() -> HybridProgram:
    return parse_program(ENCODER_PROGRAM)


def decoder_program() -> HybridProgram:
    return parse_program(DECODER_PROGRAM)


def unbounded_decoder_program() -> HybridProgram:
    return parse_program(UNBOUNDED_DECODER_PROGRAM)


def layout_word(b: BiInfBits) -> list:
    sym = {0: BIT0, 1: BIT1}
    return [sym[v] for v in b.right] + [SEP] + [sym[v] for v in b.left]


def word_layout(word: Sequence[int]) -> BiInfBits:
    bit = {BIT0: 0, BIT1: 1}
    if list(word).count(SEP) != 1:
        raise ProgramSyntaxError("layout word needs exactly one separator")
    i = list(word).index(SEP)
    return BiInfBits(tuple(bit[v] for v in word[i + 1:]), tuple(bit[v] for v in word[:i]))


def run_encoder(b: BiInfBits, program: Optional[HybridProgram] = None):
    res = vm_run(program or encoder_program(), (), layout_word(b))
    return (res.real.get(0, Fraction(0)), res.real.get(1, Fraction(0))), res


def run_decoder(pt, program: Optional[HybridProgram] = None, cap: int = 10 ** 5):
    """Returns ``(bits or None for gap points, VMResult)``."""
    res = vm_run(program or decoder_program(), [Fraction(pt[0]), Fraction(pt[1])], (), cap)
    if res.state != "done":
        return None, res
    word = [res.disc.get(i, 0) for i in range(len(res.disc))]
    return word_layout(word), res
