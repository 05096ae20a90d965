import random
from fractions import Fraction as Fr

import pytest

from cdsim import codec, fixtures
from cdsim.codec import (CodecParams, Region, codec_diagnostics, coord_X, decode, decode_axis, encode,
                         len_x, len_x_scan, len_y, len_y_scan, region, regions_to_depth, x_interval)
from cdsim.errors import BudgetExceeded, GapPoint
from cdsim.genshift import BiInfBits, StateCoding, config_to_bits

from oracles import ternary_X

FOUR = fixtures.four_symbol_fixtures()


def test_lengths():
    assert len_x(()) == 0 and len_x((0, 0, 0)) == 0
    assert len_x((1,)) == 1
    assert len_x((0, 1, 0, 0, 1, 0)) == 5
    assert len_y((0, 1)) == 2


def test_scan_variants_agree_on_layouts():
    for name, tm in FOUR.items():
        p = CodecParams.for_machine(tm)
        for c in codec.all_configurations(p, 4):
            b = config_to_bits(c, p.coding)
            assert len_x_scan(b.right, p.k) == len_x(b.right), (name, c)
            assert len_y_scan(b.left) == len_y(b.left), (name, c)


def test_scan_last_one_at_index_4():
    # k = 1: head code at 3..4, last 1 at index 4
    right = (0, 0, 0, 0, 1)
    assert len_x(right) == 5 == len_x_scan(right, 1)


def test_coordinates():
    assert coord_X(()) == 0
    assert coord_X((1,)) == Fr(2, 3)
    assert coord_X((1, 0, 1)) == Fr(20, 27)
    rng = random.Random(3)
    for _ in range(500):
        bits = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 30)))
        assert coord_X(bits) == ternary_X(bits)


def test_region_examples():
    assert x_interval((1,)) == (Fr(5, 9), Fr(2, 3))
    assert x_interval((1, 1)) == (Fr(23, 27), Fr(8, 9))
    # the square labelled 1.01: left bit 1, right bits 0 1
    r = codec.region_of_bits(BiInfBits.from_strings("1", "01"))
    assert (r.x_lo, r.x_hi, r.y_lo, r.y_hi) == (Fr(5, 27), Fr(2, 9), Fr(5, 9), Fr(2, 3))


def test_encode_point():
    assert codec.encode_bits(BiInfBits((), (1,)))[0] == Fr(11, 18)


def test_decode_examples():
    assert decode_axis(Fr(59, 81)) == (1, 0, 1)
    assert decode_axis(Fr(0)) == ()
    with pytest.raises(GapPoint):
        decode_axis(Fr(1, 2))
    with pytest.raises(BudgetExceeded):
        decode_axis(Fr(1, 4), budget=50)  # 1/4 = 0.0202..._3 never terminates


@pytest.mark.parametrize("name", sorted(FOUR))
def test_decode_inverts_encode(name):
    tm = FOUR[name]
    p = CodecParams.for_machine(tm)
    # exhaustive to tape length 8 on one fixture, 5 on the rest
    for c in tm.configurations(8 if name == "inc2" else 5):
        assert decode(encode(c, p), p) == c


def test_encode_inside_region_random():
    tm = FOUR["walker"]
    p = CodecParams.for_machine(tm)
    configs = list(tm.configurations(6))
    rng = random.Random(11)
    for c in rng.sample(configs, 1000):
        r = region(c, p)
        assert r.has_interior() and r.interior_contains(encode(c, p))


def test_interior_grid_decodes():
    tm = FOUR["inc2"]
    p = CodecParams.for_machine(tm)
    for c in tm.configurations(3):
        r = region(c, p)
        for i in range(1, 6):
            for j in range(1, 6):
                q = (r.x_lo + r.width * i / 6, r.y_lo + r.height * j / 6)
                assert decode(q, p) == c


def test_diagnostics_tape_length_four():
    p = CodecParams.for_machine(FOUR["inc2"])
    rep = codec_diagnostics(p, 4)
    assert rep.configs == 1334
    assert rep.disjoint and not rep.encode_failures
    assert not rep.nesting_violations
    # areas shrink; the longest side does not, because an empty side keeps height 1/3
    assert rep.area_shrinks
    assert set(rep.max_diam.values()) == {Fr(1, 3)}
    assert [rep.max_area[n] for n in range(5)] == [Fr(1, 9), Fr(1, 27), Fr(1, 81), Fr(1, 729), Fr(1, 6561)]


def test_same_config_same_region():
    p = CodecParams.for_machine(FOUR["inc2"])
    c = FOUR["inc2"].configurations(2)
    c = list(c)[5]
    assert region(c, p) == region(c, p)


def test_region_depth_count():
    assert len(regions_to_depth(3)) == 64
    assert len(regions_to_depth(0)) == 1


def test_region_dump_roundtrip():
    rows = regions_to_depth(2)
    assert codec.load_regions(codec.dump_regions(rows)) == rows


def test_region_closure_of_interior():
    r = Region(Fr(0), Fr(1, 3), Fr(-1, 3), Fr(0))
    assert r.has_interior()
    assert r.contains((Fr(0), Fr(0))) and not r.interior_contains((Fr(0), Fr(0)))
