"""Discrete machines: Turing machines, rule-based abstract machines, stepping,
periodic-orbit search and witnesses for one machine simulating another.

Configurations are two-sided.  ``left`` holds the cells left of the head,
nearest cell first; ``right[0]`` is the cell under the head.  Trailing blanks
on the far ends are trimmed on construction, so structural equality is the
right notion of equality.

Halt states are fixed points of the step map rather than the end of the
evolution, which keeps every machine a total map on its configurations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

from .errors import (
    MachineMismatch,
    MachineSpecError,
    ResourceBudgetExceeded,
    SymbolOutOfAlphabet,
)

BLANK = "_"
BLANK_ALIASES = ("_", "⊔")
MOVES = ("L", "R", "S")


def _strip(cells: Iterable[str]) -> tuple:
    cells = tuple(BLANK if s in BLANK_ALIASES else s for s in cells)
    end = len(cells)
    while end and cells[end - 1] == BLANK:
        end -= 1
    return cells[:end]


@dataclass(frozen=True)
class Configuration:
    left: tuple
    state: str
    right: tuple

    def __post_init__(self):
        object.__setattr__(self, "left", _strip(self.left))
        object.__setattr__(self, "right", _strip(self.right))

    @property
    def head(self) -> str:
        return self.right[0] if self.right else BLANK

    @property
    def symbols(self) -> tuple:
        return self.left + self.right

    def tape_length(self) -> int:
        """Number of non-blank cells."""
        return sum(1 for s in self.symbols if s != BLANK)

    def tape(self) -> str:
        """The tape read left to right, blanks shown as ``_``."""
        return "".join(reversed(self.left)) + "".join(self.right)

    def __str__(self) -> str:
        parts = ["".join(reversed(self.left)), self.state, "".join(self.right)]
        return " ".join(p for p in parts if p)

    @classmethod
    def parse(cls, text: str, states: Iterable[str], default_state: Optional[str] = None) -> "Configuration":
        """Parse ``"0 q0 101"``: symbols before the state token are left of
        the head, the head sits on the first symbol after it."""
        states = set(states)
        tokens = text.split()
        for i, tok in enumerate(tokens):
            if tok in states:
                left = "".join(tokens[:i])
                right = "".join(tokens[i + 1:])
                return cls(tuple(reversed(left)), tok, tuple(right))
        if default_state is None:
            raise MachineSpecError(f"no state token in configuration {text!r}")
        return cls((), default_state, tuple("".join(tokens)))


def canonicalize(c: Configuration) -> Configuration:
    return Configuration(c.left, c.state, c.right)


@dataclass(frozen=True)
class TuringMachine:
    """Deterministic one-tape machine with delta total on the non-halt states.

    ``delta`` maps ``(state, symbol)`` to ``(state, written symbol, move)``;
    the read symbol may be ``BLANK`` but the written one never is.
    """

    states: tuple
    alphabet: tuple
    start: str
    halt: frozenset
    delta: Mapping = field(compare=True)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "halt", frozenset(self.halt))
        object.__setattr__(self, "delta", dict(self.delta))
        if self.start not in self.states:
            raise MachineSpecError(f"start state {self.start!r} is not a state")
        if not self.halt or not self.halt <= set(self.states):
            raise MachineSpecError("halt states must be a nonempty subset of the states")
        if BLANK in self.alphabet or "⊔" in self.alphabet:
            raise MachineSpecError("the tape alphabet must not contain the blank")
        read = self.alphabet + (BLANK,)
        for q in self.states:
            if q in self.halt:
                continue
            for a in read:
                if (q, a) not in self.delta:
                    raise MachineSpecError(f"delta undefined on ({q}, {a})")
        for (q, a), (q2, w, mv) in self.delta.items():
            if q2 not in self.states:
                raise MachineSpecError(f"unknown target state {q2!r}")
            if w == BLANK or w == "⊔":
                raise MachineSpecError(f"rule ({q}, {a}) writes the blank")
            if w not in self.alphabet:
                raise MachineSpecError(f"rule ({q}, {a}) writes unknown symbol {w!r}")
            if mv not in MOVES:
                raise MachineSpecError(f"bad move {mv!r}")

    def is_halted(self, c: Configuration) -> bool:
        return c.state in self.halt

    def step(self, c: Configuration) -> Configuration:
        return tm_step(self, c)

    def configurations(self, max_len: int) -> Iterator[Configuration]:
        """Every configuration whose non-blank cells form one contiguous block
        of length at most ``max_len`` with the head on or next to it."""
        for q in self.states:
            yield from tape_configurations(q, self.alphabet, max_len)


def tape_configurations(state: str, alphabet: Iterable[str], max_len: int) -> Iterator[Configuration]:
    alphabet = tuple(alphabet)
    yield Configuration((), state, ())
    for n in range(1, max_len + 1):
        for word in itertools.product(alphabet, repeat=n):
            yield Configuration((), state, (BLANK,) + word)
            for h in range(n + 1):
                yield Configuration(tuple(reversed(word[:h])), state, word[h:])


def tm_step(tm: TuringMachine, c: Configuration) -> Configuration:
    for s in c.symbols:
        if s != BLANK and s not in tm.alphabet:
            raise SymbolOutOfAlphabet(f"symbol {s!r} not in {tm.alphabet}")
    if c.state not in tm.states:
        raise SymbolOutOfAlphabet(f"state {c.state!r} not in the machine")
    if c.state in tm.halt:
        return c
    q2, w, mv = tm.delta[(c.state, c.head)]
    rest = c.right[1:]
    if mv == "S":
        return Configuration(c.left, q2, (w,) + rest)
    if mv == "R":
        return Configuration((w,) + c.left, q2, rest)
    under = c.left[0] if c.left else BLANK
    return Configuration(c.left[1:], q2, (under, w) + rest)


@dataclass(frozen=True, eq=False)
class AbstractMachine:
    """A machine given by a rule on configurations instead of a delta table.

    ``space(n)`` enumerates the configurations of size at most ``n``;
    ``key`` identifies the machine for equality.
    """

    name: str
    rule: Callable[[Configuration], Configuration]
    space: Callable[[int], Iterable[Configuration]]
    halted: Callable[[Configuration], bool] = lambda c: False
    key: tuple = ()

    def __eq__(self, other):
        return isinstance(other, AbstractMachine) and (self.name, self.key) == (other.name, other.key)

    def __hash__(self):
        return hash((self.name, self.key))

    def is_halted(self, c: Configuration) -> bool:
        return self.halted(c)

    def step(self, c: Configuration) -> Configuration:
        return self.rule(c)

    def configurations(self, max_len: int) -> Iterable[Configuration]:
        return self.space(max_len)


UNARY_STATE = "u"


def unary(n: int) -> Configuration:
    """The unary word ``[n]_1``."""
    return Configuration((), UNARY_STATE, ("1",) * n)


def plus() -> AbstractMachine:
    def rule(c):
        return Configuration(c.left, c.state, c.right + ("1",))

    return AbstractMachine("Plus", rule, lambda n: (unary(m) for m in range(n + 1)))


def identity(n: int) -> AbstractMachine:
    """Identity on the words ``[1]_1 .. [n]_1``."""
    return AbstractMachine(
        f"Identity{n}", lambda c: c,
        lambda bound: (unary(m) for m in range(1, min(n, bound) + 1)), key=(n,))


def table_machine(name: str, table: Mapping[Configuration, Configuration]) -> AbstractMachine:
    """User rule table; configurations outside the table are fixed."""
    table = dict(table)
    configs = sorted(set(table) | set(table.values()), key=str)

    def space(n):
        return [c for c in configs if c.tape_length() <= n]

    return AbstractMachine(name, lambda c: table.get(c, c), space,
                           key=tuple(sorted((str(a), str(b)) for a, b in table.items())))


Machine = Union[TuringMachine, AbstractMachine]


def machine_run(m: Machine, c: Configuration, max_steps: int):
    """Iterate until a halt state or ``max_steps``; returns (config, steps, halted)."""
    steps = 0
    while steps < max_steps and not m.is_halted(c):
        c = m.step(c)
        steps += 1
    return c, steps, m.is_halted(c)


def iterate(m: Machine, c: Configuration, n: int) -> Configuration:
    """n applications of the step map (halt states stay fixed)."""
    for _ in range(n):
        if m.is_halted(c):
            break
        c = m.step(c)
    return c


def find_periodic(m: Machine, tape_len_bound: int, period_bound: int,
                  cap: int = 10 ** 6, include_halting: bool = True) -> set:
    """All configurations of size <= tape_len_bound that return to themselves
    within period_bound steps, paired with their minimal period."""
    if tape_len_bound < 1 or period_bound < 1:
        raise ValueError("bounds must be >= 1")
    found = set()
    for count, c in enumerate(m.configurations(tape_len_bound), 1):
        if count > cap:
            raise ResourceBudgetExceeded(f"more than {cap} configurations")
        if not include_halting and m.is_halted(c):
            continue
        d = c
        for p in range(1, period_bound + 1):
            d = m.step(d)
            if d == c:
                found.add((c, p))
                break
    return found


# ---------------------------------------------------------------- witnesses

@dataclass(frozen=True, eq=False)
class DiscreteCdsWitness:
    """``outer`` simulates ``inner``: encode a configuration of ``inner``, run
    ``outer`` for ``slowdown`` steps, decode.  The decoder returns ``None``
    off its domain.  ``degree`` is the exponent of the polynomial step bound
    of encoder and decoder."""

    outer: Machine
    inner: Machine
    encoder: Callable[[Configuration], Configuration]
    decoder: Callable[[Configuration], Optional[Configuration]]
    slowdown: Callable[[Configuration], int]
    degree: int = 1


def identity_witness(m: Machine) -> DiscreteCdsWitness:
    return DiscreteCdsWitness(m, m, lambda c: c, lambda c: c, lambda c: 1, 1)


def compose_witness(outer: DiscreteCdsWitness, inner: DiscreteCdsWitness) -> DiscreteCdsWitness:
    """Chain ``outer`` (T3 simulates T2) with ``inner`` (T2 simulates T1)."""
    if outer.inner != inner.outer:
        raise MachineMismatch("outer witness does not simulate the inner witness's machine")
    T3 = outer.outer

    def encoder(s):
        return outer.encoder(inner.encoder(s))

    def decoder(x):
        y = outer.decoder(x)
        return None if y is None else inner.decoder(y)

    def slowdown(x):
        y = outer.decoder(x)
        if y is None:
            return 0
        total = 0
        for _ in range(inner.slowdown(y)):
            t = outer.slowdown(x)
            x = iterate(T3, x, t)
            total += t
        return total

    return DiscreteCdsWitness(T3, inner.inner, encoder, decoder, slowdown,
                              max(outer.degree, inner.degree))


def verify_witness(w: DiscreteCdsWitness, configs: Iterable[Configuration], horizon: int) -> list:
    """Check D(E(s)) = s and D(outer^tau ... (E(s))) = inner^n(s) for n <= horizon.

    Returns a list of ``(config, step, reason)`` failures.
    """
    failures = []
    for s in configs:
        x = w.encoder(s)
        if w.decoder(x) != s:
            failures.append((s, 0, "decoder does not invert encoder"))
            continue
        target = s
        for n in range(1, horizon + 1):
            x = iterate(w.outer, x, w.slowdown(x))
            target = w.inner.step(target) if not w.inner.is_halted(target) else target
            got = w.decoder(x)
            if got != target:
                failures.append((s, n, f"decoded {got}, expected {target}"))
                break
    return failures


def slowdown_machine(tm: TuringMachine, factor: int) -> TuringMachine:
    """A machine doing each step of ``tm`` in ``factor`` steps: write and stay,
    wait ``factor - 2`` steps, then move."""
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return tm
    delta = {}
    wait_states = []
    filler = tm.alphabet[0]

    names = {}

    def wait(q2, mv, i):
        if (q2, mv, i) not in names:
            name = f"{q2}~{mv}{i}"
            while name in tm.states or name in wait_states:
                name += "'"
            names[(q2, mv, i)] = name
            wait_states.append(name)
        return names[(q2, mv, i)]

    for (q, a), (q2, w, mv) in tm.delta.items():
        if q in tm.halt:
            continue
        delta[(q, a)] = (wait(q2, mv, 1), w, "S")
        for i in range(1, factor):
            src = wait(q2, mv, i)
            for b in tm.alphabet + (BLANK,):
                wb = filler if b == BLANK else b
                if i < factor - 1:
                    delta[(src, b)] = (wait(q2, mv, i + 1), wb, "S")
                else:
                    delta[(src, b)] = (q2, wb, mv)
    return TuringMachine(tm.states + tuple(wait_states), tm.alphabet, tm.start, tm.halt, delta)


def slowdown_witness(tm: TuringMachine, factor: int):
    """Return ``(slow machine, witness that it simulates tm)``."""
    slow = slowdown_machine(tm, factor)
    original = set(tm.states)
    w = DiscreteCdsWitness(slow, tm, lambda c: c,
                           lambda c: c if c.state in original else None,
                           lambda c: factor, 1)
    return slow, w


# ------------------------------------------------------------- recoding

def recode_four_symbol(tm: TuringMachine, symbol_map: Optional[Mapping[str, str]] = None) -> TuringMachine:
    """Rename the tape symbols into ``0, 1, 2`` and pad the state set with
    unreachable halt states up to a power of two (at least 2).

    Symbols of ``0, 1, 2`` the machine never used get rules that halt in
    place, so delta stays total.
    """
    if symbol_map is None:
        if set(tm.alphabet) <= {"0", "1", "2"}:
            symbol_map = {a: a for a in tm.alphabet}
        else:
            if len(tm.alphabet) > 3:
                from .errors import AlphabetTooLarge
                raise AlphabetTooLarge(f"{len(tm.alphabet)} symbols do not fit in a 2-bit code")
            symbol_map = dict(zip(tm.alphabet, "012"))
    symbol_map = dict(symbol_map)
    symbol_map[BLANK] = BLANK
    size = 2
    while size < len(tm.states):
        size *= 2
    pad = [f"h{i}" for i in range(size) if f"h{i}" not in tm.states][: size - len(tm.states)]
    states = tm.states + tuple(pad)
    halt = set(tm.halt) | set(pad)
    a_halt = sorted(tm.halt)[0]
    delta = {}
    for (q, a), (q2, w, mv) in tm.delta.items():
        delta[(q, symbol_map[a])] = (q2, symbol_map[w], mv)
    for q in tm.states:
        if q in tm.halt:
            continue
        for a in "012":
            delta.setdefault((q, a), (a_halt, a, "S"))
    return TuringMachine(states, ("0", "1", "2"), tm.start, halt, delta)


# ------------------------------------------------------------- text format

def parse_machine(text: str) -> TuringMachine:
    """Parse the line-oriented machine format::

        states: q0, qh
        alphabet: 0, 1
        start: q0
        halt: qh
        q0,1 -> q0,0,R
    """
    header = {}
    delta = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" in line:
            lhs, rhs = (part.strip() for part in line.split("->", 1))
            try:
                q, a = (t.strip() for t in lhs.split(","))
                q2, w, mv = (t.strip() for t in rhs.split(","))
            except ValueError:
                raise MachineSpecError(f"line {lineno}: malformed rule {raw!r}") from None
            if w in BLANK_ALIASES:
                raise MachineSpecError(f"line {lineno}: rules may not write the blank")
            a = BLANK if a in BLANK_ALIASES else a
            if (q, a) in delta:
                raise MachineSpecError(f"line {lineno}: duplicate rule for ({q}, {a})")
            delta[(q, a)] = (q2, w, mv.upper())
        elif ":" in line:
            key, value = (part.strip() for part in line.split(":", 1))
            header[key.lower()] = [v.strip() for v in value.split(",") if v.strip()]
        else:
            raise MachineSpecError(f"line {lineno}: cannot parse {raw!r}")
    for key in ("states", "alphabet", "start", "halt"):
        if key not in header:
            raise MachineSpecError(f"missing header {key}:")
    if len(header["start"]) != 1:
        raise MachineSpecError("exactly one start state expected")
    return TuringMachine(header["states"], header["alphabet"], header["start"][0],
                         header["halt"], delta)


def dump_machine(tm: TuringMachine) -> str:
    lines = [
        "states: " + ", ".join(tm.states),
        "alphabet: " + ", ".join(tm.alphabet),
        "start: " + tm.start,
        "halt: " + ", ".join(q for q in tm.states if q in tm.halt),
    ]
    for (q, a), (q2, w, mv) in sorted(tm.delta.items()):
        lines.append(f"{q},{a} -> {q2},{w},{mv}")
    return "\n".join(lines) + "\n"
