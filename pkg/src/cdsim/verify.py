"""Certification of simulating systems and the bookkeeping behind the
non-universality arguments.

Simulation is certified by exact box containment: if ``f^tau`` maps the box of
``s`` into the box of ``T(s)`` then, by induction, every point of the box
decodes to the machine trace.  The toral tools work with convex rational
polygons split exactly at the seams of the unit square.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .codec import CodecParams, Region, decode, region
from .disk import DiskMap
from .errors import CdsError, NonpositiveArea
from .genshift import tm_to_genshift
from .machines import Configuration, TuringMachine, tm_step


@dataclass
class CdsBundle:
    dynamics: DiskMap
    codec: CodecParams
    machine: TuringMachine
    slowdown: int = 1


def disk_bundle(tm: TuringMachine, depth_budget: int = 256) -> CdsBundle:
    p = CodecParams.for_machine(tm, depth_budget)
    return CdsBundle(DiskMap(tm_to_genshift(tm, p.coding)), p, tm)


# ------------------------------------------------------------ simulation

@dataclass
class StepCheck:
    config: Configuration
    step: int
    ok: bool
    detail: str = ""


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)
    configs: int = 0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.ok]

    @property
    def first_failure(self) -> Optional[StepCheck]:
        return next((c for c in self.checks if not c.ok), None)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config", "step", "status", "detail"])
        for c in self.checks:
            w.writerow([str(c.config), c.step, "pass" if c.ok else "FAIL", c.detail])
        return buf.getvalue()


def verify_cds(b: CdsBundle, configs: Iterable[Configuration], horizon: int) -> VerifyReport:
    """Check ``f^tau(box) ⊆ region(T^n s)`` along each trace; a failing
    config stops at its first failing step."""
    report = VerifyReport()
    image = {}

    def step_box(box):
        if box not in image:
            out = box
            for _ in range(b.slowdown):
                out = b.dynamics.f_box(out)
            image[box] = out
        return image[box]

    for c in configs:
        report.configs += 1
        box = region(c, b.codec)
        cur = c
        for n in range(1, horizon + 1):
            try:
                box = step_box(box)
            except CdsError as e:
                report.checks.append(StepCheck(c, n, False, f"{type(e).__name__}: {e}"))
                break
            cur = tm_step(b.machine, cur)
            target = region(cur, b.codec)
            if not target.contains_region(box):
                report.checks.append(StepCheck(c, n, False, f"image {box.as_strings()} not in box of {cur}"))
                break
            report.checks.append(StepCheck(c, n, True))
    return report


# ------------------------------------------------------------ robustness

def _radical_inverse(i: int, base: int) -> Fraction:
    out, f = Fraction(0), Fraction(1, base)
    while i:
        i, d = divmod(i, base)
        out += d * f
        f /= base
    return out


def halton_points(box: Region, n: int, seed: int = 0) -> list:
    """Rational Halton points strictly inside ``box``."""
    pts = []
    i = seed + 1
    while len(pts) < n:
        u, v = _radical_inverse(i, 2), _radical_inverse(i, 3)
        i += 1
        if u == 0 or v == 0:
            continue
        pts.append((box.x_lo + u * box.width, box.y_lo + v * box.height))
    return pts


@dataclass
class RobustnessReport:
    config: Configuration
    samples: int
    correct: int
    failures: list  # (point, step, decoded or error)

    @property
    def ok(self) -> bool:
        return self.correct == self.samples


def robustness_probe(b: CdsBundle, config: Configuration, n_samples: int, seed: int = 0,
                     horizon: int = 10, points: Optional[Sequence] = None) -> RobustnessReport:
    """Iterate the kink-mode map from interior points and decode every
    simulated step."""
    f = b.dynamics.with_mode("kink")
    trace = [config]
    for _ in range(horizon):
        trace.append(tm_step(b.machine, trace[-1]))
    box = region(config, b.codec)
    if points is None:
        points = halton_points(box, n_samples, seed)
    points = [p for p in points if box.interior_contains(p)]
    correct, failures = 0, []
    for pt in points:
        p = pt
        bad = None
        for n in range(1, horizon + 1):
            try:
                for _ in range(b.slowdown):
                    p = f.f_eval(p)
                got = decode(p, b.codec)
            except CdsError as e:
                bad = (pt, n, f"{type(e).__name__}: {e}")
                break
            if got != trace[n]:
                bad = (pt, n, str(got))
                break
        if bad:
            failures.append(bad)
        else:
            correct += 1
    return RobustnessReport(config, len(points), correct, failures)


# ---------------------------------------------------------- toral polygons

Polygon = tuple  # tuple of (x, y) Fraction vertices, counter-clockwise


def box_polygon(r: Region) -> Polygon:
    return ((r.x_lo, r.y_lo), (r.x_hi, r.y_lo), (r.x_hi, r.y_hi), (r.x_lo, r.y_hi))


def polygon_area(poly: Polygon) -> Fraction:
    s = Fraction(0)
    for (x0, y0), (x1, y1) in zip(poly, poly[1:] + poly[:1]):
        s += x0 * y1 - x1 * y0
    return abs(s) / 2


def _clip(poly: Polygon, axis: int, value, keep_below: bool) -> Polygon:
    """Sutherland-Hodgman against the half-plane ``p[axis] <= value`` (or >=)."""
    def inside(p):
        return p[axis] <= value if keep_below else p[axis] >= value

    out = []
    n = len(poly)
    for i in range(n):
        cur, nxt = poly[i], poly[(i + 1) % n]
        if inside(cur):
            out.append(cur)
        if inside(cur) != inside(nxt) and cur[axis] != nxt[axis]:
            t = (value - cur[axis]) / (nxt[axis] - cur[axis])
            q = (cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1]))
            if not out or out[-1] != q:
                out.append(q)
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return tuple(out)


def _slabs(poly: Polygon, axis: int):
    """Split along the integer lines of one axis: yields (cell index, piece)."""
    lo = math.floor(min(p[axis] for p in poly))
    hi = math.ceil(max(p[axis] for p in poly))
    rest = poly
    for i in range(lo, hi):
        if len(rest) < 3:
            return
        piece = _clip(rest, axis, i + 1, True)
        rest = _clip(rest, axis, i + 1, False)
        if len(piece) >= 3 and polygon_area(piece) > 0:
            yield i, piece


def wrap_polygon(poly: Polygon) -> list:
    """Cut a plane polygon at the integer grid and translate every piece into
    the unit square."""
    out = []
    for j, slab in _slabs(poly, 1):
        for i, piece in _slabs(slab, 0):
            out.append(tuple((x - i, y - j) for x, y in piece))
    return out


@dataclass(frozen=True)
class LinearToralMap:
    """``v -> A v mod 1`` on the unit torus."""

    matrix: tuple  # ((a, b), (c, d)) integers

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def power(self, n: int) -> tuple:
        (a, b), (c, d) = self.matrix
        m = ((1, 0), (0, 1))
        for _ in range(n):
            (p, q), (r, s) = m
            m = ((a * p + b * r, a * q + b * s), (c * p + d * r, c * q + d * s))
        return m

    def apply(self, pt, n: int = 1):
        (a, b), (c, d) = self.power(n)
        x, y = pt
        X, Y = a * x + b * y, c * x + d * y
        return X - math.floor(X), Y - math.floor(Y)

    def image(self, poly: Polygon, n: int = 1) -> list:
        """``f^n`` of a convex polygon in the unit square, as convex pieces."""
        (a, b), (c, d) = self.power(n)
        moved = tuple((a * x + b * y, c * x + d * y) for x, y in poly)
        if polygon_area(moved) == 0:
            return []
        return wrap_polygon(moved)

    def __call__(self, box: Region, n: int = 1) -> list:
        return self.image(box_polygon(box), n)


CAT_MAP = LinearToralMap(((2, 1), (1, 1)))
IDENTITY_MAP = LinearToralMap(((1, 0), (0, 1)))


def pieces_area(pieces: Iterable[Polygon]) -> Fraction:
    return sum((polygon_area(p) for p in pieces), Fraction(0))


def intersection_area(poly: Polygon, box: Region) -> Fraction:
    for axis, lo, hi in ((0, box.x_lo, box.x_hi), (1, box.y_lo, box.y_hi)):
        poly = _clip(poly, axis, hi, True)
        if len(poly) < 3:
            return Fraction(0)
        poly = _clip(poly, axis, lo, False)
        if len(poly) < 3:
            return Fraction(0)
    return polygon_area(poly)


def mixing_first_hit(m: LinearToralMap, U: Region, V: Region, n_max: int) -> Optional[int]:
    """Smallest ``n <= n_max`` with ``f^n(U) ∩ V`` of positive area."""
    if not (U.has_interior() and V.has_interior()):
        raise ValueError("U and V need nonempty interiors")
    poly = box_polygon(U)
    for n in range(n_max + 1):
        if any(intersection_area(p, V) > 0 for p in m.image(poly, n)):
            return n
    return None


def orbit_areas(m: LinearToralMap, box: Region, iterates: int) -> list:
    """Exact area of ``f^n(box)`` for ``n = 0..iterates``."""
    poly = box_polygon(box)
    return [pieces_area(m.image(poly, n)) for n in range(iterates + 1)]


# ---------------------------------------------------------------- censuses

@dataclass
class MeasureCensus:
    total_measure: Fraction
    region_areas: list
    disjoint: bool = True


@dataclass
class CensusVerdict:
    feasible: bool
    bound: Optional[int]

    @property
    def label(self) -> str:
        return "Feasible" if self.feasible else "Infeasible"


def measure_census(mc: MeasureCensus, demanded: Union[int, float, None]) -> CensusVerdict:
    """Pigeonhole: disjoint regions of area at least ``a`` number at most
    ``floor(total / a)``.  ``demanded`` of ``math.inf`` or None means
    infinitely many."""
    if not mc.region_areas or any(Fraction(a) <= 0 for a in mc.region_areas):
        raise NonpositiveArea("every region needs positive area")
    if not mc.disjoint:
        return CensusVerdict(True, None)
    bound = math.floor(Fraction(mc.total_measure) / min(Fraction(a) for a in mc.region_areas))
    if demanded is None or demanded == math.inf:
        return CensusVerdict(False, bound)
    return CensusVerdict(demanded <= bound, bound)


def plus_orbit_census(m: LinearToralMap, box: Region, iterates: int = 10) -> MeasureCensus:
    """Census for the forward images of one box under a toral map.

    A machine with infinitely many distinct reachable configurations (Plus)
    would need the images to be pairwise disjoint; their areas are fixed by
    the determinant, so the demand cannot be met."""
    return MeasureCensus(Fraction(1), orbit_areas(m, box, iterates), True)


@dataclass
class InvariantReport:
    n: int
    results: list  # (box, bool)

    @property
    def passed(self) -> int:
        return sum(ok for _, ok in self.results)


def invariant_census(f: Union[LinearToralMap, Callable[[Region], Region]], boxes: Sequence[Region],
                     n: int) -> InvariantReport:
    """Count the boxes with ``f^n(box) ⊆ box``."""
    results = []
    for box in boxes:
        if isinstance(f, LinearToralMap):
            pieces = f(box, n)
            ok = bool(pieces) and all(box.contains((x, y)) for p in pieces for x, y in p)
        else:
            img = box
            for _ in range(n):
                img = f(img)
            ok = box.contains_region(img)
        results.append((box, ok))
    return InvariantReport(n, results)
