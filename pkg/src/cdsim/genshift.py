"""Bi-infinite bit strings and the compilation of 4-symbol Turing machines to
generalized shifts.

Bit layout of a configuration, position 0 being the first bit right of the
point::

    ... s_-2 s_-1 . s_0 s_1 | s_2 .. s_{k+1} | s_{k+2} s_{k+3} | s_{k+4} ...
        left tape    left of    state bits      head symbol      right tape
                     the head

Symbols are coded blank -> 00, 0 -> 01, 1 -> 10, 2 -> 11.  The shift is
``shift(b, n)_i = b_{i+n}``, so a positive shift moves the point to the right
(this is the direction the R-move case needs).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .errors import AlphabetTooLarge, MalformedLayout, ShapeMismatch
from .machines import BLANK, Configuration, TuringMachine, tm_step

SYMBOL_CODE = {BLANK: (0, 0), "0": (0, 1), "1": (1, 0), "2": (1, 1)}
CODE_SYMBOL = {v: k for k, v in SYMBOL_CODE.items()}
MOVE_SHIFT = {"L": -2, "S": 0, "R": 2}


def _trim(bits) -> tuple:
    bits = tuple(int(b) for b in bits)
    end = len(bits)
    while end and bits[end - 1] == 0:
        end -= 1
    return bits[:end]


@dataclass(frozen=True)
class BiInfBits:
    """Finite-support element of {0,1}^Z.

    ``left[j]`` is bit ``-(j+1)`` and ``right[j]`` is bit ``j``.
    """

    left: tuple = ()
    right: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "left", _trim(self.left))
        object.__setattr__(self, "right", _trim(self.right))

    @classmethod
    def from_strings(cls, left: str = "", right: str = "") -> "BiInfBits":
        """``left`` is written in reading order, nearest bit last."""
        return cls(tuple(int(c) for c in reversed(left)), tuple(int(c) for c in right))

    def __getitem__(self, i: int) -> int:
        if i >= 0:
            return self.right[i] if i < len(self.right) else 0
        j = -i - 1
        return self.left[j] if j < len(self.left) else 0

    def support(self) -> int:
        return sum(self.left) + sum(self.right)

    def shift(self, n: int) -> "BiInfBits":
        """``result_i = self_{i+n}``."""
        if n == 0:
            return self
        lo, hi = -len(self.left), len(self.right)
        cells = {i - n: self[i] for i in range(lo, hi)}
        right = [cells.get(i, 0) for i in range(max(hi - n, 0))]
        left = [cells.get(-j - 1, 0) for j in range(max(n - lo, 0))]
        return BiInfBits(tuple(left), tuple(right))

    def left_string(self) -> str:
        return "".join(str(b) for b in reversed(self.left))

    def right_string(self) -> str:
        return "".join(str(b) for b in self.right)

    def __str__(self) -> str:
        return f"…0 {self.left_string()} . {self.right_string()} 0…"

    @classmethod
    def parse(cls, text: str) -> "BiInfBits":
        body = text.replace("…", " ").replace("...", " ").strip()
        if "." not in body:
            raise ValueError(f"no point in {text!r}")
        left, right = body.split(".", 1)
        left = "".join(left.split())
        right = "".join(right.split())
        if set(left + right) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls.from_strings(left, right)


# ------------------------------------------------------------ state coding

@dataclass(frozen=True)
class StateCoding:
    """Assignment of k-bit codes to the 2^k states of a machine."""

    k: int
    codes: tuple  # ((state, bits), ...)

    @classmethod
    def for_machine(cls, tm: TuringMachine) -> "StateCoding":
        """Start state gets 0...0; the others follow in declaration order."""
        n = len(tm.states)
        k = max(1, (n - 1).bit_length())
        if n != 2 ** k:
            raise ShapeMismatch(f"{n} states is not a power of two (>= 2)")
        order = [tm.start] + [q for q in tm.states if q != tm.start]
        codes = tuple((q, tuple(int(c) for c in format(i, f"0{k}b"))) for i, q in enumerate(order))
        return cls(k, codes)

    @classmethod
    def anonymous(cls, k: int) -> "StateCoding":
        """States named by their bit strings, e.g. ``q01``."""
        codes = tuple((f"q{''.join(map(str, bits))}", bits)
                      for bits in itertools.product((0, 1), repeat=k))
        return cls(k, codes)

    def bits(self, state: str) -> tuple:
        for q, b in self.codes:
            if q == state:
                return b
        raise ShapeMismatch(f"state {state!r} has no code")

    def state(self, bits) -> str:
        bits = tuple(bits)
        for q, b in self.codes:
            if b == bits:
                return q
        raise MalformedLayout(f"no state with code {bits}")


def _code(sym: str) -> tuple:
    try:
        return SYMBOL_CODE[sym]
    except KeyError:
        raise AlphabetTooLarge(f"symbol {sym!r} is outside the 4-symbol alphabet") from None


def config_to_bits(c: Configuration, coding: StateCoding) -> BiInfBits:
    right = list(_code(c.left[0] if c.left else BLANK))
    right += coding.bits(c.state)
    for sym in c.right or (BLANK,):
        right += _code(sym)
    left = []
    for sym in c.left[1:]:
        b1, b2 = _code(sym)
        left += [b2, b1]
    return BiInfBits(tuple(left), tuple(right))


def _symbol_run(codes, where):
    """Symbols up to the first blank; anything non-blank after it is an
    interior blank."""
    out = []
    ended = False
    for code in codes:
        sym = CODE_SYMBOL[code]
        if sym == BLANK:
            ended = True
        elif ended:
            raise MalformedLayout(f"blank inside the {where} tape segment")
        else:
            out.append(sym)
    return out


def bits_to_config(b: BiInfBits, coding: StateCoding) -> Configuration:
    k = coding.k
    n_right = max(len(b.right), k + 4)
    n_right += (n_right - k) % 2
    r = [b[i] for i in range(n_right)]
    n_left = len(b.left) + len(b.left) % 2
    lcodes = [(b[-2 * j - 2], b[-2 * j - 1]) for j in range(n_left // 2)]
    left = _symbol_run([tuple(r[0:2])] + lcodes, "left")
    state = coding.state(r[2:k + 2])
    head = CODE_SYMBOL[tuple(r[k + 2:k + 4])]
    rcodes = [tuple(r[i:i + 2]) for i in range(k + 4, n_right, 2)]
    rest = _symbol_run(rcodes, "right")
    if head == BLANK and left and rest:
        raise MalformedLayout("blank under the head inside the tape segment")
    return Configuration(tuple(left), state, (head,) + tuple(rest))


# ------------------------------------------------------- generalized shifts

@dataclass(frozen=True, eq=False)
class GeneralizedShift:
    """``Phi(s) = shift(G(s), F(s))`` with F read from bits 2..k+3 and G
    rewriting bits 0..k+3 as a function of those same bits."""

    k: int
    F: Mapping
    G: Mapping

    def __post_init__(self):
        object.__setattr__(self, "F", dict(self.F))
        object.__setattr__(self, "G", dict(self.G))
        if len(self.F) != 2 ** (self.k + 2) or len(self.G) != 2 ** (self.k + 4):
            raise ShapeMismatch("tables do not cover their domains")
        for key, v in self.F.items():
            if len(key) != self.k + 2 or v not in (-2, 0, 2):
                raise ShapeMismatch(f"bad F entry {key} -> {v}")
        for key, v in self.G.items():
            if len(key) != self.k + 4 or len(v) != self.k + 4:
                raise ShapeMismatch(f"bad G entry {key} -> {v}")

    def __eq__(self, other):
        return isinstance(other, GeneralizedShift) and (self.k, self.F, self.G) == (other.k, other.F, other.G)

    def window(self, b: BiInfBits) -> tuple:
        return tuple(b[i] for i in range(self.k + 4))

    def shift_of(self, z: tuple) -> int:
        return self.F[tuple(z[2:])]


def genshift_apply(phi: GeneralizedShift, b: BiInfBits) -> BiInfBits:
    n = phi.k + 4
    z = phi.window(b)
    right = phi.G[z] + tuple(b.right[n:])
    return BiInfBits(b.left, right).shift(phi.F[z[2:]])


def identity_shift(k: int) -> GeneralizedShift:
    F = {z: 0 for z in itertools.product((0, 1), repeat=k + 2)}
    G = {z: z for z in itertools.product((0, 1), repeat=k + 4)}
    return GeneralizedShift(k, F, G)


def tm_to_genshift(tm: TuringMachine, coding: Optional[StateCoding] = None) -> GeneralizedShift:
    """Compile a machine over ``0, 1, 2`` with 2^k states.

    New bits on the domain of effect, by move of the applied rule::

        S:  a  q' w        L:  q' a  w        R:  a  w  q'

    with ``a`` the symbol left of the head, ``q'`` the new state and ``w`` the
    written symbol.  Halt states and symbol codes the machine does not use
    get the identity entry.
    """
    if not set(tm.alphabet) <= {"0", "1", "2"}:
        raise ShapeMismatch(f"alphabet {tm.alphabet} is not a subset of 0, 1, 2")
    coding = coding or StateCoding.for_machine(tm)
    if 2 ** coding.k != len(tm.states):
        raise ShapeMismatch("state coding does not match the machine")
    k = coding.k
    F, G = {}, {}
    for z in itertools.product((0, 1), repeat=k + 4):
        a = z[0:2]
        q = coding.state(z[2:k + 2])
        x = CODE_SYMBOL[z[k + 2:k + 4]]
        rule = None
        if q not in tm.halt and (q, x) in tm.delta:
            rule = tm.delta[(q, x)]
        if rule is None:
            G[z] = z
            F[z[2:]] = 0
            continue
        q2, w, mv = rule
        qb, wb = coding.bits(q2), SYMBOL_CODE[w]
        G[z] = {"S": a + qb + wb, "L": qb + a + wb, "R": a + wb + qb}[mv]
        F[z[2:]] = MOVE_SHIFT[mv]
    return GeneralizedShift(k, F, G)


@dataclass
class ConjugacyReport:
    checked: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_conjugacy(tm: TuringMachine, phi: GeneralizedShift, tape_len_bound: int,
                     coding: Optional[StateCoding] = None) -> ConjugacyReport:
    """Exhaustively compare ``Phi . bits`` with ``bits . step``."""
    coding = coding or StateCoding.for_machine(tm)
    checked = 0
    failures = []
    for c in tm.configurations(tape_len_bound):
        checked += 1
        lhs = genshift_apply(phi, config_to_bits(c, coding))
        rhs = config_to_bits(tm_step(tm, c), coding)
        if lhs != rhs:
            failures.append(c)
    return ConjugacyReport(checked, failures)


def _bitstr(bits) -> str:
    return "".join(str(b) for b in bits)


def dump_tables(phi: GeneralizedShift) -> str:
    lines = [f"k = {phi.k}"]
    lines += [f"F {_bitstr(z)} = {phi.F[z]}" for z in sorted(phi.F)]
    lines += [f"G {_bitstr(z)} = {_bitstr(phi.G[z])}" for z in sorted(phi.G)]
    return "\n".join(lines) + "\n"


def load_tables(text: str) -> GeneralizedShift:
    k = None
    F, G = {}, {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, value = (p.strip() for p in line.split("=", 1))
        if key == "k":
            k = int(value)
        elif key.startswith("F "):
            F[tuple(int(c) for c in key[2:].strip())] = int(value)
        elif key.startswith("G "):
            G[tuple(int(c) for c in key[2:].strip())] = tuple(int(c) for c in value)
    if k is None:
        raise ShapeMismatch("missing k")
    return GeneralizedShift(k, F, G)
