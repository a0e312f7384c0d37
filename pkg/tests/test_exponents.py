from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import oracle_pass, random_tuples, tuple_kwargs
from divfree_strichartz.errors import (BadExponent, MissingField,
                                       NotApplicable, WrongDimension)
from divfree_strichartz.exponents import (
    INF, SELECTORS, THEOREMS, ExponentTuple, ExtraneousField,
    check, check_inhomo_wave3d, check_schrodinger, check_schrodinger_scalar,
    check_taggart, check_wave_scalar, check_wave_system, enumerate_exponents,
    parse_exponent, reciprocal_grid, recip, reduced_tuple, select_alpha_inhomo,
    select_alpha_schrod, select_alpha_wave, taggart_reduction, tuple_from_row,
    tuples_to_csv)


def wave(n, q, r, qt, s, k):
    return ExponentTuple("wave_system", n, q=q, r=r, qt=qt, s=s, k=k)


THM2 = wave(2, 8, 8, INF, Fr(5, 8), Fr(5, 8))
THM5 = ExponentTuple("inhomo_wave3d", 3, q=INF, r=2, qt=INF, k=Fr(1, 2))
THM7 = ExponentTuple("schrodinger", 2, q=4, r=4, qt=4, s=0, k=Fr(1, 2))


# --- parsing / tuple contract -----------------------------------------------------

@pytest.mark.parametrize("text,value", [("5/8", Fr(5, 8)), ("0.625", Fr(5, 8)), ("inf", INF),
                                        ("  3 ", Fr(3)), (0.375, Fr(3, 8)), (2, Fr(2))])
def test_parse_exponent(text, value):
    assert parse_exponent(text) == value


@pytest.mark.parametrize("bad", ["5/", "a", "1/0", float("nan"), "-inf", 0.100000001, True, None])
def test_parse_exponent_rejects(bad):
    with pytest.raises(BadExponent):
        parse_exponent(bad)


def test_tuple_contract():
    with pytest.raises(MissingField):
        ExponentTuple("wave_system", 2, q=8, r=8, qt=INF, s=Fr(5, 8))
    with pytest.raises(ExtraneousField):
        ExponentTuple("wave_system", 2, q=8, r=8, qt=INF, s=Fr(5, 8), k=Fr(5, 8), gamma=0)
    with pytest.raises(BadExponent):
        wave(2, Fr(1, 2), 8, INF, 0, 0)
    with pytest.raises(BadExponent):
        ExponentTuple("inhomo_wave3d", 3, q=INF, r=2, qt=INF, k=INF)
    with pytest.raises(ValueError):
        ExponentTuple("Thm9", 2)
    assert THM2.values() == {"q": 8, "r": 8, "qt": INF, "s": Fr(5, 8), "k": Fr(5, 8)}
    assert wave(2, "8", 8.0, "inf", "0.625", "5/8") == THM2


def test_conjugate_convention():
    assert recip(INF) == 0 and 1 - recip(INF) == 1
    assert recip(Fr(4)) + (1 - recip(Fr(4))) == 1


# --- wave system --------------------------------------------------------------------

def test_wave_system_examples():
    assert check_wave_system(THM2).passed
    res = check_wave_system(wave(2, 4, 4, INF, 0, 0))
    assert "wave_admissible(q,r)" in res.names()
    slack = {v.name: v.slack for v in res.violations}["wave_admissible(q,r)"]
    assert slack == Fr(3, 8) - Fr(1, 4)
    res = check_wave_system(wave(3, INF, 2, 2, Fr(1, 2), Fr(1, 2)))
    assert "qt>4/(n-1)" in res.names() and not res


def test_k_zero_impossible_in_3d():
    # in 3D, k = 0 forces (q, r, qt) = (inf, 2, 2), which qt > 2 excludes
    for t in enumerate_exponents("wave_system", 3, 8):
        assert t.k != 0


def test_wave_scalar_examples():
    assert check_wave_scalar(reduced_tuple(THM2, select_alpha_wave(THM2))).passed
    t = ExponentTuple("wave_scalar", 2, q=8, r=8, qt=INF, rt=2, s=Fr(5, 8), gamma=Fr(5, 8) - 1)
    assert check_wave_scalar(t).passed
    assert "rt<inf" in check_wave_scalar(t.with_values(rt=INF)).names()


def test_inhomo_examples():
    assert check_inhomo_wave3d(THM5).passed
    bad = ExponentTuple("inhomo_wave3d", 3, q=2, r=6, qt=2, k=Fr(1, 2))
    assert "sum<min(1,(k+1)/2)" in check_inhomo_wave3d(bad).names()
    with pytest.raises(WrongDimension):
        check_inhomo_wave3d(ExponentTuple("inhomo_wave3d", 2, q=INF, r=2, qt=INF, k=Fr(1, 2)))
    with pytest.raises(MissingField):
        ExponentTuple("inhomo_wave3d", 3, q=INF, r=2, qt=INF)


def test_taggart_examples():
    red = reduced_tuple(THM5, select_alpha_inhomo(THM5))
    assert check_taggart(red).passed
    t = ExponentTuple("taggart", 3, q=2, r=6, qt=2, rt=6, gamma=1)
    assert "sum<1" in check_taggart(t).names()
    t = ExponentTuple("taggart", 3, q=4, r=4, qt=INF, rt=4, gamma=Fr(-3, 4))
    assert "sum<=(gamma+1)/2" in check_taggart(t).names()
    with pytest.raises(WrongDimension):
        check_taggart(ExponentTuple("taggart", 2, q=4, r=4, qt=4, rt=4, gamma=0))


def test_schrodinger_examples():
    assert check_schrodinger(THM7).passed
    assert "k>s" in check_schrodinger(THM7.with_values(k=Fr(0))).names()
    res = check_schrodinger(ExponentTuple("schrodinger", 2, q=1, r=4, qt=4, s=0, k=Fr(1, 2)))
    assert "q>=2" in res.names()


def test_schrodinger_scalar_examples():
    good = ExponentTuple("schrodinger_scalar", 2, q=4, r=4, qt=4, rt=8, s=0, gamma=Fr(1, 4))
    assert check_schrodinger_scalar(good).passed
    assert "gamma>s" in check_schrodinger_scalar(good.with_values(gamma=Fr(0))).names()
    assert "rt<inf" in check_schrodinger_scalar(good.with_values(rt=INF)).names()


def test_checker_rejects_wrong_tag():
    with pytest.raises(NotApplicable):
        check_schrodinger(THM2)


# --- brute-force agreement ------------------------------------------------------------

@pytest.mark.parametrize("theorem", THEOREMS)
def test_checkers_agree_with_float_oracle(theorem):
    tuples = random_tuples(theorem, 2000, seed=17)
    verdicts = [check(t).passed for t in tuples]
    oracle = [oracle_pass(theorem, t.n, **tuple_kwargs(t)) for t in tuples]
    assert verdicts == oracle
    # the sample exercises both outcomes
    assert 0.05 < np.mean(verdicts) < 0.95


# --- constructions -------------------------------------------------------------------

def test_select_alpha_wave_examples():
    a = select_alpha_wave(THM2)
    assert (a.alpha, a.rt, a.gamma) == (1, 2, THM2.k - 1)
    t = next(t for t in enumerate_exponents("wave_system", 3, 8) if t.qt == 4)
    a = select_alpha_wave(t)
    assert (a.alpha, a.rt) == (Fr(3, 4), 4)
    with pytest.raises(NotApplicable):
        select_alpha_wave(wave(2, 4, 4, INF, 0, 0))


def test_select_alpha_inhomo_example():
    a = select_alpha_inhomo(THM5)
    # slacks: (k+1) - 2*0 = 3/2 and (3/2)(1 - 0) = 3/2
    assert a.alpha == Fr(3, 4) and a.rt == 4 and a.gamma == Fr(-1, 4)
    assert a.alpha < Fr(3, 2)
    total = recip(THM5.q) + recip(THM5.qt)
    assert total <= ((THM5.k - a.alpha) + 1) / 2 and recip(THM5.qt) + 2 * a.alpha / 3 < 1
    with pytest.raises(NotApplicable):
        select_alpha_inhomo(THM2)
    with pytest.raises(NotApplicable):
        select_alpha_inhomo(THM5.with_values(k=Fr(1)))


def test_select_alpha_schrod_examples():
    a = select_alpha_schrod(THM7)
    # k - s = 1/2: half of min{1/2, 1}
    assert (a.alpha, a.rt) == (Fr(1, 4), 8)
    assert check_schrodinger_scalar(reduced_tuple(THM7, a)).passed
    # largest possible gap k - s = n/2 (qt = inf)
    top = ExponentTuple("schrodinger", 2, q=INF, r=2, qt=INF, s=0, k=1)
    a = select_alpha_schrod(top)
    assert (a.alpha, a.rt, a.gamma) == (Fr(1, 2), 4, Fr(1, 2))
    assert check_schrodinger_scalar(reduced_tuple(top, a)).passed
    with pytest.raises(NotApplicable):
        select_alpha_schrod(THM7.with_values(k=Fr(0)))


def test_schrod_gap_never_exceeds_half_dimension():
    for n in (2, 3):
        assert all(t.k - t.s <= Fr(n, 2) for t in enumerate_exponents("schrodinger", n, 8))


def _dense_feasible(t, denominator=1200):
    """Feasible ``(1/r1, 1/rt1)`` pairs from an exact scan of ``1/r1`` in ``[0, 1/2]``."""
    a, b, at, bt = (recip(getattr(t, f)) for f in ("q", "r", "qt", "rt"))
    S = 1 - a - at
    hits = []
    for p in range(denominator // 2 + 1):
        x = Fr(p, denominator)
        y = S - x
        if not (b <= x <= Fr(1, 2) and bt <= y <= Fr(1, 2)):
            continue
        ok1 = a + 2 * x < 1 or (a == 0 and x == Fr(1, 2))
        ok2 = at + 2 * y < 1 or (at == 0 and y == Fr(1, 2))
        if ok1 and ok2:
            hits.append((x, y))
    return hits


TAGGART_CASES = [
    (ExponentTuple("taggart", 3, q=Fr(5, 3), r=6, qt=INF, rt=5, gamma=Fr(3, 10)), (Fr(60, 11), Fr(60, 13))),
    (ExponentTuple("taggart", 3, q=2, r=5, qt=INF, rt=4, gamma=Fr(3, 20)), (Fr(40, 9), Fr(40, 11))),
    (ExponentTuple("taggart", 3, q=2, r=6, qt=INF, rt=3, gamma=0), (Fr(6), Fr(3))),
]


@pytest.mark.parametrize("t,expected", TAGGART_CASES)
def test_taggart_reduction_cases(t, expected):
    assert check_taggart(t).passed
    assert _dense_feasible(t)
    r1, rt1 = taggart_reduction(t)
    assert (r1, rt1) == expected
    a, at = recip(t.q), recip(t.qt)
    assert 1 / r1 + 1 / rt1 == 1 - a - at
    assert 2 <= r1 <= t.r and 2 <= rt1 <= t.rt
    assert a + 2 / r1 < 1 or (a == 0 and r1 == 2)
    assert at + 2 / rt1 < 1 or (at == 0 and rt1 == 2)


def test_taggart_reduction_symmetric():
    red = reduced_tuple(THM5, select_alpha_inhomo(THM5))
    assert taggart_reduction(red) == (2, 2)
    t = ExponentTuple("taggart", 3, q=4, r=4, qt=4, rt=4, gamma=0)
    assert check_taggart(t).passed
    r1, rt1 = taggart_reduction(t)
    assert r1 == rt1 == 4


@pytest.mark.parametrize("theorem,n", [("wave_system", 2), ("wave_system", 3), ("inhomo_wave3d", 3),
                                       ("schrodinger", 2), ("schrodinger", 3)])
def test_reduction_soundness_small_grid(theorem, n):
    for t in enumerate_exponents(theorem, n, 6):
        red = reduced_tuple(t, SELECTORS[theorem](t))
        assert check(red).passed, (t, red)
        if theorem == "inhomo_wave3d":
            assert select_alpha_inhomo(t).alpha < Fr(3, 2)
            taggart_reduction(red)


# --- enumeration ---------------------------------------------------------------------

def test_enumerate_example():
    out = enumerate_exponents("wave_system", 2, 8)
    assert THM2 in out
    assert out == sorted(out, key=ExponentTuple.sort_key)
    assert out == enumerate_exponents("wave_system", 2, 8)
    assert all(check(t).passed for t in out)
    assert enumerate_exponents("wave_system", 2, 0) == []
    assert enumerate_exponents("wave_system", 2, values=[]) == []


def test_enumerate_regularity_consistency():
    for n in (2, 3, 4):
        for t in enumerate_exponents("wave_system", n, 6):
            assert t.s >= 0
            if n >= 3:
                assert t.k >= Fr(n - 3, 2)


def test_enumerate_is_exhaustive_on_grid():
    # every passing tuple on the grid appears: rebuild candidates independently
    grid = reciprocal_grid(4)
    found = set(map(str, enumerate_exponents("schrodinger", 2, 4)))
    for a in grid:
        for b in grid:
            for at in grid:
                if b == 0:
                    continue
                s = 1 - 2 * a - 2 * b
                kk = 1 + s - 2 * at
                ex = lambda x: INF if x == 0 else 1 / x
                t = ExponentTuple("schrodinger", 2, q=ex(a), r=ex(b), qt=ex(at), s=s, k=kk)
                assert check(t).passed == (str(t) in found)


def test_csv_roundtrip():
    out = enumerate_exponents("inhomo_wave3d", 3, 4)
    text = tuples_to_csv(out)
    import csv
    import io
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [tuple_from_row(r) for r in rows] == out


def test_enumerate_rejects():
    with pytest.raises(ValueError):
        enumerate_exponents("Thm9", 2)
    with pytest.raises(WrongDimension):
        enumerate_exponents("taggart", 2)


# --- properties ---------------------------------------------------------------------

recips = st.fractions(min_value=0, max_value=1, max_denominator=24)
regs = st.fractions(min_value=-3, max_value=3, max_denominator=24)


@given(a=recips, b=recips.filter(lambda x: x > 0), at=recips, s=regs, k=regs, n=st.integers(2, 5))
def test_checker_pure_and_exact(a, b, at, s, k, n):
    ex = lambda x: INF if x == 0 else 1 / x
    t = wave(n, ex(a), ex(b), ex(at), s, k)
    r1, r2 = check(t), check(t)
    assert r1 == r2
    assert r1.passed == (len(r1.violations) == 0)
    assert all(isinstance(v.slack, Fr) for v in r1.violations)
    assert r1.passed == oracle_pass("wave_system", n, **tuple_kwargs(t))


@given(theorem=st.sampled_from(THEOREMS), seed=st.integers(0, 10 ** 6))
def test_checker_slack_signs(theorem, seed):
    for t in random_tuples(theorem, 5, seed):
        for v in check(t).violations:
            assert v.slack >= 0 or v.name.startswith("scale")
