"""Independent re-evaluations used as test oracles.

The exponent oracle works directly on the exponents in floating point, with
``math.inf`` for infinite Lebesgue exponents and a ``1e-12`` tolerance on every
comparison.  Random tuples have reciprocals with small denominators, so distinct
values differ by far more than the tolerance and the float verdict is exact.
"""
import math
import random
from fractions import Fraction

from divfree_strichartz.exponents import ExponentTuple

TOL = 1e-12
INF = math.inf


def _le(a, b):
    return a <= b + TOL


def _lt(a, b):
    return a < b - TOL


def _eq(a, b):
    return abs(a - b) <= TOL


def _inv(x):
    return 1.0 / x  # 1/inf = 0.0


def _finite_ge2(x):
    return 2 <= x < INF


def _wave_adm(n, q, r):
    return _le(_inv(q) + (n - 1) / (2 * r), (n - 1) / 4)


def _acceptable(q, r):
    return _lt(_inv(q) + 2 / r, 1) or (q == INF and r == 2)


def oracle_pass(theorem, n, q=None, r=None, qt=None, rt=None, s=None, k=None, gamma=None):
    q, r, qt, rt = (None if v is None else float(v) for v in (q, r, qt, rt))
    s, k, gamma = (None if v is None else float(v) for v in (s, k, gamma))
    if theorem == "wave_system":
        return (n >= 2 and q >= 2 and qt >= 2 and _finite_ge2(r)
                and (n not in (2, 3) or qt > 4 / (n - 1) + TOL)
                and _wave_adm(n, q, r)
                and _eq(1 / q + n / r, n / 2 - s)
                and _eq(n / 2 - s, (1 - 1 / qt) + n - 2 - k))
    if theorem == "wave_scalar":
        return (n >= 2 and q >= 2 and qt >= 2 and _finite_ge2(r) and _finite_ge2(rt)
                and _wave_adm(n, q, r) and _wave_adm(n, qt, rt)
                and _eq(1 / q + n / r, n / 2 - s)
                and _eq(n / 2 - s, (1 - 1 / qt) + n * (1 - 1 / rt) - 2 - gamma))
    if theorem == "inhomo_wave3d":
        return (n == 3 and q > 1 and qt > 1 and _finite_ge2(r)
                and _lt(1 / q + 1 / qt, min(1.0, (k + 1) / 2))
                and _acceptable(q, r)
                and _eq(1 / q + 3 / r, 2 - k - 1 / qt))
    if theorem == "taggart":
        return (n == 3 and q > 1 and qt > 1 and _finite_ge2(r) and _finite_ge2(rt)
                and _lt(1 / q + 1 / qt, 1)
                and _le(1 / q + 1 / qt, (gamma + 1) / 2)
                and _acceptable(q, r) and _acceptable(qt, rt)
                and _eq(1 / q + 3 / r, 2 - gamma - 1 / qt - 3 / rt))
    if theorem == "schrodinger":
        return (n >= 2 and q >= 2 and qt >= 2 and _finite_ge2(r)
                and _le(0, s) and _lt(s, k)
                and _eq(2 / q + n / r, n / 2 - s)
                and _eq(2 / qt, n / 2 - k + s))
    if theorem == "schrodinger_scalar":
        return (n >= 2 and q >= 2 and qt >= 2 and _finite_ge2(r) and _finite_ge2(rt)
                and _le(0, s) and _lt(s, gamma)
                and _eq(2 / q + n / r, n / 2 - s)
                and _eq(2 / qt + n / rt, n / 2 - gamma + s))
    raise ValueError(theorem)


# ---------------------------------------------------------------------------
# random tuples

_RECIPS = sorted({Fraction(p, d) for d in range(1, 9) for p in range(d + 1)})
_LOW = [x for x in _RECIPS if x <= Fraction(1, 2)]


def _exp(x):
    return INF if x == 0 else 1 / x


def _solved(theorem, n, a, b, at, bt):
    """Regularity indices that make the scale identities hold."""
    h = Fraction(n, 2)
    if theorem == "wave_system":
        s = h - a - n * b
        return {"s": s, "k": (1 - at) + n - 2 - h + s}
    if theorem == "wave_scalar":
        s = h - a - n * b
        return {"s": s, "gamma": (1 - at) + n * (1 - bt) - 2 - h + s}
    if theorem == "inhomo_wave3d":
        return {"k": 2 - at - a - 3 * b}
    if theorem == "taggart":
        return {"gamma": 2 - at - 3 * bt - a - 3 * b}
    if theorem == "schrodinger":
        s = h - 2 * a - n * b
        return {"s": s, "k": h + s - 2 * at}
    s = h - 2 * a - n * b
    return {"s": s, "gamma": h + s - 2 * at - n * bt}


def random_tuples(theorem, count, seed=0):
    """Seeded tuples mixing near-passing and arbitrary exponents."""
    rng = random.Random(seed)
    dims = [3] if theorem in ("inhomo_wave3d", "taggart") else [2, 3, 4]
    scalar = theorem in ("wave_scalar", "taggart", "schrodinger_scalar")
    out = []
    for _ in range(count):
        n = rng.choice(dims)
        pick = lambda: rng.choice(_LOW if rng.random() < 0.8 else _RECIPS)
        a, b, at = pick(), pick(), pick()
        bt = pick() if scalar else None
        vals = _solved(theorem, n, a, b, at, bt)
        for key in vals:
            u = rng.random()
            if u < 0.15:
                vals[key] += Fraction(rng.choice([-1, 1]), rng.randint(1, 12))
            elif u < 0.2:
                vals[key] = Fraction(rng.randint(-8, 8), rng.randint(1, 8))
        exps = {"q": _exp(a), "r": _exp(b), "qt": _exp(at)}
        if scalar:
            exps["rt"] = _exp(bt)
        exps.update(vals)
        out.append(ExponentTuple(theorem, n, **exps))
    return out


def tuple_kwargs(t):
    return dict(t.values())
