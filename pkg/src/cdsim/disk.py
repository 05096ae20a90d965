"""The piecewise map of the disk that simulates a generalized shift.

``f = H . G``.  ``G`` slides and rescales the vertical strip ``B_z`` of every
window ``z`` (the first k+4 right bits) so that the box of ``s`` lands on the
box of ``G(s)``; ``H`` applies the nonlinear Baker map ``S`` twice, or its
inverse twice, to move the point.  ``S`` moves bit ``-1`` to position 0, i.e.
it realizes ``shift(., -1)``.  A left move (shift -2) is therefore ``S o S``
and a right move is ``S^-1 o S^-1``.  ``H`` uses the shift of the strip the
point started in.

Ramps come in three modes:

* ``exact``: affine branches only; queries strictly inside the blend zone
  ``(-b/2, 0)`` raise BlendZoneQuery.  Used for certification.
* ``kink``: the continuous piecewise-linear representative with the slope
  change at 0.  Exact rationals everywhere, used for interior sample points.
* ``smooth``: a C-infinity strictly increasing blend in floating point.

Every mode is increasing and agrees at the box corners, so box images do not
depend on the mode.
"""
from __future__ import annotations

import bisect
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Optional

from scipy import integrate, optimize

from .codec import THIRD, Region, coord_X, len_x, region_of_bits
from .errors import BlendZoneCorner, BlendZoneQuery, OutsideDomain
from .genshift import BiInfBits, GeneralizedShift

MODES = ("exact", "kink", "smooth")
TWO_THIRDS = Fraction(2, 3)
FIVE_NINTHS = Fraction(5, 9)


# ------------------------------------------------------------------ ramps

def _h(t: float) -> float:
    return math.exp(-1.0 / t) if t > 0 else 0.0


def _step(t: float) -> float:
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    if t <= 0:
        return 0.0
    if t >= 1:
        return 1.0
    a, b = _h(t), _h(1 - t)
    return a / (a + b)


class _Blend:
    """Increasing C-infinity function on [0, 1] with slope ``sL`` near 0,
    slope ``sR`` near 1 and total rise ``sL``.

    The slope is ``base(t) * (1 - nu * plateau(t))`` where ``base`` steps from
    sL to sR and the plateau bump removes the surplus area.  ``eps`` keeps
    ``nu < 1`` so the slope stays positive.
    """

    def __init__(self, sL: float, sR: float):
        self.sL, self.sR = sL, sR
        self.eps = min(0.25, sL / (4 * max(sL, sR)))
        surplus = (sR - sL) / 2
        pts = [self.eps, 1 - self.eps]
        J = integrate.quad(lambda t: self.base(t) * self.plateau(t), 0, 1,
                           points=pts, limit=200, epsabs=1e-15, epsrel=1e-13)[0]
        self.nu = surplus / J
        if self.nu >= 1:
            raise ArithmeticError("blend construction lost monotonicity")

    def base(self, t):
        return self.sL + (self.sR - self.sL) * _step(t)

    def plateau(self, t):
        return _step(t / self.eps) * _step((1 - t) / self.eps)

    def slope(self, t):
        return self.base(t) * (1 - self.nu * self.plateau(t))

    def rise(self, t):
        pts = [p for p in (self.eps, 1 - self.eps) if 0 < p < t]
        return integrate.quad(self.slope, 0, t, points=pts or None, limit=200,
                              epsabs=1e-15, epsrel=1e-13)[0]


@lru_cache(maxsize=None)
def _blend(sL: float, sR: float) -> _Blend:
    return _Blend(sL, sR)


@dataclass(frozen=True)
class RampSpec:
    """``q``: slope a left of the zone, 1 right of it.
    ``r``: slope 1 left of the zone, a right of it.  Zone is (-b/2, 0)."""

    kind: str
    a: Fraction
    b: Fraction
    mode: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if self.kind not in ("q", "r") or self.mode not in MODES:
            raise ValueError(f"bad ramp {self.kind}/{self.mode}")
        if self.a <= 0 or self.b <= 0:
            raise ValueError("ramp parameters must be positive")

    @property
    def slopes(self):
        return (self.a, Fraction(1)) if self.kind == "q" else (Fraction(1), self.a)

    def in_zone(self, x) -> bool:
        return -self.b / 2 < x < 0


def ramp_eval(spec: RampSpec, x):
    sL, sR = spec.slopes
    if spec.mode == "smooth":
        x = float(x)
        half = float(spec.b) / 2
        if x <= -half:
            return float(sL) * x
        if x >= 0:
            return float(sR) * x
        blend = _blend(float(sL), float(sR))
        return -float(sL) * half + half * blend.rise((x + half) / half)
    x = Fraction(x)
    if spec.mode == "exact" and spec.in_zone(x):
        raise BlendZoneQuery(f"{x} lies inside the blend zone of {spec}")
    if x < 0 and (spec.mode == "kink" or x <= -spec.b / 2):
        return sL * x
    return sR * x


def ramp_inverse(spec: RampSpec, y):
    """Inverse of :func:`ramp_eval` (both branches pass through 0)."""
    sL, sR = spec.slopes
    if spec.mode != "smooth":
        out = y / sL if y < 0 else y / sR
        if spec.mode == "exact" and spec.in_zone(out):
            raise BlendZoneQuery(f"{y} has its preimage inside the blend zone")
        return out
    y = float(y)
    half = float(spec.b) / 2
    if y <= -float(sL) * half:
        return y / float(sL)
    if y >= 0:
        return y / float(sR)
    return optimize.brentq(lambda x: ramp_eval(spec, x) - y, -half, 0.0, xtol=1e-16, rtol=1e-15)


def _check_corner(spec: RampSpec, x):
    if spec.in_zone(x):
        raise BlendZoneCorner(f"box corner {x} lies inside the blend zone of {spec}")


# -------------------------------------------------------------- Baker map

R_SHRINK = Fraction(1, 3)   # r_{1/3,1/3}
R_STRETCH = Fraction(3)     # r_{3,1/3}


def _r(a, mode):
    return RampSpec("r", a, THIRD, mode)


def _block(v) -> str:
    if -THIRD <= v <= THIRD:
        return "lower"
    if FIVE_NINTHS <= v <= 1:
        return "upper"
    raise OutsideDomain(f"{v} is in neither Baker block")


def baker_S(pt, mode: str = "exact", lower_block: str = "y"):
    """Upper block ``(x/3 + 2/3, 3(y - 2/3))``; lower block
    ``(r_{1/3,1/3}(x), r_{3,1/3}(y))``.  ``lower_block="x"`` evaluates the
    second ramp at x instead of y."""
    x, y = pt
    if not -THIRD <= x <= 1:
        raise OutsideDomain(f"x = {x} outside [-1/3, 1]")
    if _block(y) == "upper":
        if mode == "smooth":
            return float(x) / 3 + 2 / 3, 3 * (float(y) - 2 / 3)
        return x / 3 + TWO_THIRDS, 3 * (y - TWO_THIRDS)
    second = y if lower_block == "y" else x
    return ramp_eval(_r(R_SHRINK, mode), x), ramp_eval(_r(R_STRETCH, mode), second)


def baker_S_inv(pt, mode: str = "exact"):
    x, y = pt
    if not -THIRD <= y <= 1:
        raise OutsideDomain(f"y = {y} outside [-1/3, 1]")
    if _block(x) == "upper":
        if mode == "smooth":
            return 3 * (float(x) - 2 / 3), float(y) / 3 + 2 / 3
        return 3 * (x - TWO_THIRDS), y / 3 + TWO_THIRDS
    return ramp_inverse(_r(R_SHRINK, mode), x), ramp_inverse(_r(R_STRETCH, mode), y)


def _box_block(lo, hi) -> str:
    a, b = _block(lo), _block(hi)
    if a != b:
        raise OutsideDomain(f"[{lo}, {hi}] straddles both Baker blocks")
    return a


def baker_S_box(box: Region, lower_block: str = "y") -> Region:
    if box.x_lo < -THIRD or box.x_hi > 1:
        raise OutsideDomain(f"{box} leaves [-1/3, 1] in x")
    if _box_block(box.y_lo, box.y_hi) == "lower":
        shrink, stretch = _r(R_SHRINK, "exact"), _r(R_STRETCH, "exact")
        src = (box.y_lo, box.y_hi) if lower_block == "y" else (box.x_lo, box.x_hi)
        for v in (box.x_lo, box.x_hi):
            _check_corner(shrink, v)
        for v in src:
            _check_corner(stretch, v)
    lo = baker_S((box.x_lo, box.y_lo), "exact", lower_block)
    hi = baker_S((box.x_hi, box.y_hi), "exact", lower_block)
    return Region(lo[0], hi[0], lo[1], hi[1])


def baker_S_inv_box(box: Region) -> Region:
    if box.y_lo < -THIRD or box.y_hi > 1:
        raise OutsideDomain(f"{box} leaves [-1/3, 1] in y")
    if _box_block(box.x_lo, box.x_hi) == "lower":
        for v in (box.x_lo, box.x_hi, box.y_lo, box.y_hi):
            if -THIRD / 2 < v < 0:
                raise BlendZoneCorner(f"box corner {v} lies in a blend zone of the inverse")
    lo = baker_S_inv((box.x_lo, box.y_lo))
    hi = baker_S_inv((box.x_hi, box.y_hi))
    return Region(lo[0], hi[0], lo[1], hi[1])


# ----------------------------------------------------------------- strips

@dataclass(frozen=True)
class Strip:
    z: tuple
    box: Region
    x_src: Fraction   # X(z 0...)
    x_dst: Fraction   # X(G(z) 0...)
    ramp_a: Fraction
    ramp_b: Fraction
    shift: int        # F(z)

    def ramp(self, mode: str) -> RampSpec:
        return RampSpec("q", self.ramp_a, self.ramp_b, mode)


def strip_box(z: tuple, k: int) -> Region:
    X = coord_X(z)
    return Region(X - THIRD ** (len_x(z) + 1), X + THIRD ** (k + 4), -THIRD, Fraction(1))


class DiskMap:
    """Partial map of [-1/3, 1]^2 built from a generalized shift.

    ``mode`` selects the ramp used by :meth:`f_eval`; :meth:`f_box` always
    works on exact corners.
    """

    def __init__(self, phi: GeneralizedShift, mode: str = "exact", lower_block: str = "y"):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}")
        self.phi = phi
        self.k = phi.k
        self.mode = mode
        self.lower_block = lower_block
        strips = []
        for z, gz in phi.G.items():
            Lz, Lg = len_x(z), len_x(gz)
            strips.append(Strip(z, strip_box(z, self.k), coord_X(z), coord_X(gz),
                                Fraction(3) ** Lz / Fraction(3) ** Lg, THIRD ** (Lz + 1),
                                phi.shift_of(z)))
        strips.sort(key=lambda s: s.box.x_lo)
        self.strips = strips
        self._lows = [s.box.x_lo for s in strips]

    def with_mode(self, mode: str) -> "DiskMap":
        return DiskMap(self.phi, mode, self.lower_block)

    def min_strip_gap(self) -> Fraction:
        return min(b.box.x_lo - a.box.x_hi for a, b in zip(self.strips, self.strips[1:]))

    def strip_at(self, x) -> Strip:
        i = bisect.bisect_right(self._lows, x) - 1
        if i >= 0 and x <= self.strips[i].box.x_hi:
            return self.strips[i]
        raise OutsideDomain(f"x = {x} is not in any strip")

    def strip_of_box(self, box: Region) -> Strip:
        s = self.strip_at(box.x_lo)
        if not s.box.contains_region(box):
            raise OutsideDomain(f"{box} is not inside a single strip")
        return s

    # G ------------------------------------------------------------------
    def strip_G(self, pt, strip: Optional[Strip] = None):
        x, y = pt
        if not -THIRD <= y <= 1:
            raise OutsideDomain(f"y = {y} outside [-1/3, 1]")
        s = strip or self.strip_at(x)
        if self.mode == "smooth":
            return ramp_eval(s.ramp("smooth"), float(x) - float(s.x_src)) + float(s.x_dst), float(y)
        return ramp_eval(s.ramp(self.mode), x - s.x_src) + s.x_dst, y

    def g_box(self, box: Region) -> Region:
        s = self.strip_of_box(box)
        ramp = s.ramp("exact")
        u_lo, u_hi = box.x_lo - s.x_src, box.x_hi - s.x_src
        _check_corner(ramp, u_lo)
        _check_corner(ramp, u_hi)
        return Region(ramp_eval(ramp, u_lo) + s.x_dst, ramp_eval(ramp, u_hi) + s.x_dst,
                      box.y_lo, box.y_hi)

    # H ------------------------------------------------------------------
    def _h_point(self, pt, shift: int):
        for _ in range(abs(shift)):
            pt = baker_S(pt, self.mode, self.lower_block) if shift < 0 else baker_S_inv(pt, self.mode)
        return pt

    def _h_box(self, box: Region, shift: int) -> Region:
        for _ in range(abs(shift)):
            box = baker_S_box(box, self.lower_block) if shift < 0 else baker_S_inv_box(box)
        return box

    # f ------------------------------------------------------------------
    def f_eval(self, pt):
        s = self.strip_at(pt[0])
        return self._h_point(self.strip_G(pt, s), s.shift)

    def f_box(self, box: Region) -> Region:
        s = self.strip_of_box(box)
        return self._h_box(self.g_box(box), s.shift)

    def f_box_iter(self, box: Region, n: int) -> Region:
        for _ in range(n):
            box = self.f_box(box)
        return box


def area_probe(box_map: Callable[[Region], Region], box: Region):
    return box.area(), box_map(box).area()


def dump_trajectory(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "x", "y"])
    for i, (x, y) in enumerate(points):
        w.writerow([i, str(x), str(y)])
    return buf.getvalue()
