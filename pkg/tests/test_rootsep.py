import math
import random
from fractions import Fraction as Fr

import pytest

from cdsim.errors import DegreeTooSmall, NotSquare, PolynomialSyntaxError, ZeroPolynomial
from cdsim.rootsep import (BoundParams, LogOf, PolyMatrix, RatPoly, anosov_mixing_steps, bounds_report,
                           cauchy_bound, count_roots, crit_value_bound, det_leibniz, halting_bound_1d, hadamard_bound,
                           integerize, isolate_real_roots, min_value_bound, mixing_inequality_holds, parse_poly,
                           poly_gcd, read_corpus, resultant, resultant_y, rows_to_csv, rsep_exact, rsep_lower_bound,
                           rsep_lower_bound_interval, squarefree, standardize, sturm_sequence)

from oracles import grid_sign_changes, poly_from_roots, resultant_from_roots

X = RatPoly.x()


def _rand_int_poly(rng, deg, c=20):
    coeffs = [rng.randint(-c, c) for _ in range(deg)] + [rng.choice([i for i in range(-c, c + 1) if i])]
    return RatPoly(tuple(coeffs))


def _rand_rat_poly(rng, deg):
    return RatPoly(tuple(Fr(rng.randint(-30, 30), rng.randint(1, 40)) for _ in range(deg))
                   + (Fr(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 40)),))


def _rand_poly_matrix(rng, n):
    return PolyMatrix(tuple(tuple(RatPoly(tuple(rng.randint(-3, 3) for _ in range(rng.randint(0, 3))))
                                  for _ in range(n)) for _ in range(n)))


# ------------------------------------------------------------ polynomials

def test_parse_and_print():
    p = parse_poly("3x^2 - x/2 + 1/3")
    assert p.coeffs == (Fr(1, 3), Fr(-1, 2), Fr(3))
    assert str(p) == "3 x^2 - 1/2 x + 1/3"
    rng = random.Random(1)
    for _ in range(100):
        q = _rand_rat_poly(rng, rng.randint(0, 5))
        assert parse_poly(str(q)) == q
    with pytest.raises(PolynomialSyntaxError):
        parse_poly("3x^^2")


def test_arithmetic():
    p = X * X - 1
    q, r = p.divmod(X - 1)
    assert q == X + 1 and r.is_zero()
    assert p.derivative() == X * 2
    assert (X + 1) ** 3 == RatPoly((1, 3, 3, 1))
    assert p.compose(X + 1) == X * X + X * 2
    assert poly_gcd(p, X * X + X * 3 + 2) == X + 1
    assert squarefree((X - 1) ** 3 * (X + 2)) == (X - 1) * (X + 2)


def test_standardize_examples():
    pt, s, st = standardize(RatPoly((6, 0, 3)))
    assert pt == RatPoly((6, 0, 3)) and st == 9 and s == 9
    pt, s, st = standardize(RatPoly((1, Fr(1, 2))))
    assert pt == RatPoly((2, 1)) and st == 3 and s == Fr(3, 2)
    with pytest.raises(ZeroPolynomial):
        standardize(RatPoly())


def test_standardize_fuzz():
    rng = random.Random(2)
    for _ in range(500):
        p = _rand_rat_poly(rng, rng.randint(0, 6))
        pt, _, _ = standardize(p)
        assert all(abs(a) >= 1 for a in pt.coeffs if a)
        # same roots: a positive multiple
        ratio = {b / a for a, b in zip(p.coeffs, pt.coeffs) if a}
        assert len(ratio) == 1 and next(iter(ratio)) > 0


def test_integerize():
    assert integerize(RatPoly((Fr(1, 2), Fr(1, 3)))) == RatPoly((3, 2))
    assert integerize(RatPoly((4, 6))) == RatPoly((2, 3))


# ------------------------------------------------------------- resultants

def test_resultant_examples():
    assert resultant(X - 1, X + 1) == 2
    assert resultant_from_roots(1, [1], 1, [-1]) == 2
    assert resultant(X * X - 1, X - 1) == 0


def test_resultant_matches_root_products():
    rng = random.Random(3)
    for _ in range(60):
        rp = [Fr(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(1, 4))]
        rq = [Fr(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(1, 4))]
        a, b = rng.randint(1, 4), rng.randint(-3, -1)
        p, q = RatPoly(tuple(poly_from_roots(rp, a))), RatPoly(tuple(poly_from_roots(rq, b)))
        assert resultant(p, q) == resultant_from_roots(a, rp, b, rq)


def test_resultant_multiplicative():
    rng = random.Random(4)
    for _ in range(100):
        p, q, r = (_rand_int_poly(rng, rng.randint(1, 3), 6) for _ in range(3))
        assert resultant(p * q, r) == resultant(p, r) * resultant(q, r)


def test_resultant_zero_iff_common_factor():
    rng = random.Random(5)
    seen = set()
    for _ in range(100):
        shared = rng.random() < 0.5
        common = RatPoly((rng.randint(-3, 3), 1))
        p = _rand_int_poly(rng, rng.randint(1, 3), 5)
        q = _rand_int_poly(rng, rng.randint(1, 3), 5)
        if shared:
            p, q = p * common, q * common
        zero = resultant(p, q) == 0
        assert zero == (poly_gcd(p, q).degree >= 1)
        seen.add(zero)
    assert seen == {True, False}


def test_resultant_in_y():
    # roots of R are the values of P at roots of Q
    q = (X - 1) * (X - 2)
    p = X * X
    R = resultant_y(q, p)
    assert R(1) == 0 and R(4) == 0 and R(2) != 0
    with pytest.raises(DegreeTooSmall):
        resultant_y(q, RatPoly.const(3))


# ---------------------------------------------------------- determinants

def test_hadamard_examples():
    m = PolyMatrix(((1, 1), (1, -1)))
    assert hadamard_bound(m) == 4 and m.det().norm1() == 2
    eye = PolyMatrix(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert hadamard_bound(eye) == 1 == eye.det().norm1()
    with pytest.raises(NotSquare):
        PolyMatrix(((1, 2), (3,)))


@pytest.mark.parametrize("n,count", [(4, 50), (5, 10)])
def test_hadamard_random(n, count):
    rng = random.Random(n)
    for _ in range(count):
        m = _rand_poly_matrix(rng, n)
        d = m.det()
        assert d == det_leibniz(m)
        assert d.norm1() <= hadamard_bound(m)


def test_cauchy_examples():
    assert cauchy_bound(X * X - 4) == 5
    assert cauchy_bound(X - 1) == 2
    with pytest.raises(DegreeTooSmall):
        cauchy_bound(RatPoly.const(3))


def test_cauchy_contains_all_real_roots():
    rng = random.Random(6)
    for _ in range(200):
        p = _rand_int_poly(rng, rng.randint(1, 6))
        B = cauchy_bound(p)
        sf = squarefree(p)
        seq = sturm_sequence(sf)
        total = count_roots(sf, -100 * B, 100 * B, seq)
        assert count_roots(sf, -B, B, seq) == total
        for lo, hi in isolate_real_roots(p):
            assert -B <= lo and hi <= B + 1


# ------------------------------------------------------------------ Sturm

def test_isolate_examples():
    iv = isolate_real_roots(X * X - 1, (-2, 2))
    assert len(iv) == 2
    assert iv[0][0] <= -1 <= iv[0][1] and iv[1][0] <= 1 <= iv[1][1]
    lo, hi = rsep_exact((X - Fr(1, 3)) * (X - Fr(2, 3)))
    assert lo <= Fr(1, 3) <= hi and hi - lo < Fr(1, 1000)
    iv = isolate_real_roots(X * X)
    assert len(iv) == 1 and iv[0][0] <= 0 <= iv[0][1]


def test_endpoint_roots_come_back_degenerate():
    iv = isolate_real_roots(X * X - 1, (-1, 1))
    assert iv == [(-1, -1), (1, 1)]
    assert rsep_exact(X * X - 1) == (2, 2)


def test_sturm_counts_match_grid():
    rng = random.Random(7)
    for _ in range(60):
        roots = rng.sample([Fr(2 * k + 1, 20) for k in range(-10, 10)], rng.randint(1, 5))
        p = RatPoly(tuple(poly_from_roots(roots, rng.choice([-3, 1, 2])))) * (X * X + 1)
        assert count_roots(p, -1, 1) == len(roots) == grid_sign_changes(p.coeffs, -1, 1, 97)
        assert len(isolate_real_roots(p, (-1, 1))) == len(roots)


# ------------------------------------------------------------------ bounds

def test_rsep_examples():
    b = rsep_lower_bound(X * X - 1)
    assert abs(float(b) - 2 * math.sqrt(2) / 36) < 1e-12
    assert b <= 2 == rsep_exact(X * X - 1)[0]
    assert rsep_lower_bound(X * X - X) <= 1
    with pytest.raises(DegreeTooSmall):
        rsep_lower_bound(X - 1)


def test_rsep_uses_integer_multiple():
    # scaling does not change the roots, so neither may it change the bound
    p = (X - Fr(1, 3)) * (X - Fr(2, 3))
    assert rsep_lower_bound(p) == rsep_lower_bound(p * 9) == rsep_lower_bound(p * Fr(1, 100))


def test_rsep_soundness_corpus():
    # 500 draws; the ones with two or more roots in [-1, 1] are checked
    rng = random.Random(9)
    checked = 0
    for _ in range(500):
        p = _rand_int_poly(rng, rng.randint(2, 6))
        br = rsep_exact(p)
        if br is None:
            continue
        checked += 1
        assert rsep_lower_bound(p) <= br[0], str(p)
    assert checked > 50


def test_rsep_interval_variant():
    p = (X - 3) * (X - Fr(31, 10)) * (X + 5)
    br = rsep_exact(p, (2, 4))
    b = rsep_lower_bound_interval(p, 2, 4)
    assert 0 < b <= br[0]


def test_min_value_bound_example():
    p, q = X + 2, X - 1
    assert abs(p(1)) == 3 >= min_value_bound(p, q)


def test_min_value_bound_random():
    rng = random.Random(10)
    for _ in range(100):
        roots = [Fr(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        q = integerize(RatPoly(tuple(poly_from_roots(roots))))
        p = _rand_int_poly(rng, rng.randint(1, 4), 6)
        b = min_value_bound(p, q)
        pt, _, _ = standardize(p)
        for mu in roots:
            if p(mu) != 0:
                assert abs(pt(mu)) >= b


def test_crit_value_bound():
    p = X * X - X * 2
    assert crit_value_bound(p) == Fr(1, 256)
    assert abs(p(1)) >= crit_value_bound(p)


def test_halting_bound():
    assert halting_bound_1d(3, 2) == 256
    assert halting_bound_1d(0, 2) == 2
    assert halting_bound_1d(2, Fr(3, 2)) == Fr(81, 16)
    with pytest.raises(ValueError):
        halting_bound_1d(2, 1)


def test_anosov_example():
    p = BoundParams(Fr(10), LogOf(Fr(2)), Fr(1, 3), 2)
    N0 = anosov_mixing_steps(p)
    assert N0 == 7
    assert mixing_inequality_holds(p, 7) and not mixing_inequality_holds(p, 6)


def test_anosov_integer_threshold():
    # threshold exactly 2: N0 = 3 is the least integer with strict inequality
    p = BoundParams(Fr(4), LogOf(Fr(2)), Fr(1, 2), 0)
    assert anosov_mixing_steps(p) == 3
    assert anosov_mixing_steps(BoundParams(Fr(1), Fr(1), Fr(1, 2), 0)) == 1


def test_anosov_random_draws_minimal():
    rng = random.Random(12)
    for _ in range(20):
        p = BoundParams(Fr(rng.randint(1, 500), rng.randint(1, 10)),
                        rng.choice([LogOf(Fr(rng.randint(2, 9))), Fr(rng.randint(1, 40), 17)]),
                        Fr(rng.randint(1, 9), 10), rng.randint(0, 12))
        N0 = anosov_mixing_steps(p)
        assert mixing_inequality_holds(p, N0)
        assert N0 == 0 or not mixing_inequality_holds(p, N0 - 1)


def test_bound_params_validation():
    with pytest.raises(ValueError):
        BoundParams(Fr(1), Fr(1), Fr(3, 2), 0)
    with pytest.raises(ValueError):
        BoundParams(Fr(1), LogOf(Fr(1, 2)), Fr(1, 2), 0)


# ----------------------------------------------------------------- report

def test_corpus_report():
    polys = read_corpus("# demo\nx^2 - 1\n2x - 3  # linear\nx^3 - x\n")
    rows = bounds_report(polys)
    assert [r["degree"] for r in rows] == [2, 1, 3]
    assert rows[1]["rsep_bound"] == "" and rows[1]["cauchy"] == "5/2"
    assert Fr(rows[2]["rsep_lower"]) <= 1 <= Fr(rows[2]["rsep_upper"])
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == "polynomial,degree,rsep_bound,rsep_lower,rsep_upper,cauchy"
