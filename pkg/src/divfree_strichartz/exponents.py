"""Exponent conditions of the wave and Schrodinger estimates, in exact arithmetic.

Exponents are :class:`fractions.Fraction` values, with ``math.inf`` standing for
an infinite Lebesgue exponent.  Every condition is evaluated on reciprocals
(``1/inf = 0``), so the equality constraints are decided exactly.

Condition systems (``theorem`` tags):

``wave_system``        divergence-free forcing for the wave system, ``L^1_x`` forcing norm
``wave_scalar``        scalar wave Strichartz estimate with ``L^{r~'}_x`` forcing
``inhomo_wave3d``      three-dimensional inhomogeneous wave system, zero data
``taggart``            scalar inhomogeneous wave estimate in three dimensions
``schrodinger``        divergence-free forcing for the Schrodinger system
``schrodinger_scalar`` scalar Schrodinger Strichartz estimate

A :class:`CheckResult` lists each failed condition with its slack, the signed
amount by which the condition misses (``lhs - rhs``; zero for a strict
inequality that holds with equality).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import NamedTuple, Optional, Union

from .errors import (BadExponent, Infeasible, MissingField, NotApplicable,
                     WrongDimension)

INF = math.inf
Ext = Union[Fraction, float]

THEOREMS = ("wave_system", "wave_scalar", "inhomo_wave3d", "taggart",
            "schrodinger", "schrodinger_scalar")

REQUIRED = {
    "wave_system": ("q", "r", "qt", "s", "k"),
    "wave_scalar": ("q", "r", "qt", "rt", "s", "gamma"),
    "inhomo_wave3d": ("q", "r", "qt", "k"),
    "taggart": ("q", "r", "qt", "rt", "gamma"),
    "schrodinger": ("q", "r", "qt", "s", "k"),
    "schrodinger_scalar": ("q", "r", "qt", "rt", "s", "gamma"),
}

LEBESGUE = ("q", "r", "qt", "rt")
REGULARITY = ("s", "k", "gamma")
OPTIONAL = LEBESGUE + REGULARITY


class ExtraneousField(BadExponent):
    """A field irrelevant to the selected condition system was supplied."""


def parse_exponent(value, max_denominator: int = 10 ** 6, allow_inf: bool = True) -> Ext:
    """Convert user input to an exact rational or ``INF``.

    Accepts ``Fraction``, ``int``, strings such as ``"5/8"``, ``"0.625"`` or
    ``"inf"``, and floats.  A float is rounded to the nearest rational with
    denominator at most ``max_denominator`` and rejected unless that rational
    reproduces it to ``1e-12``.
    """
    if isinstance(value, bool):
        raise BadExponent(f"not an exponent: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity", "oo", "∞"):
            out = INF
        else:
            try:
                out = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise BadExponent(f"not a rational number: {value!r}") from exc
    elif isinstance(value, float):
        if math.isnan(value):
            raise BadExponent("NaN is not an exponent")
        if math.isinf(value):
            out = INF if value > 0 else -INF
        else:
            out = Fraction(value).limit_denominator(max_denominator)
            if abs(float(out) - value) > 1e-12 * max(1.0, abs(value)):
                raise BadExponent(f"{value!r} is not within 1e-12 of a rational with "
                                  f"denominator <= {max_denominator}")
    else:
        raise BadExponent(f"not an exponent: {value!r}")
    if out == -INF or (out == INF and not allow_inf):
        raise BadExponent(f"exponent must be finite here: {value!r}")
    return out


def recip(x: Ext) -> Fraction:
    """``1/x`` with ``1/inf = 0``."""
    return Fraction(0) if x == INF else 1 / Fraction(x)


def conj_recip(x: Ext) -> Fraction:
    """Reciprocal of the Holder conjugate: ``1/x' = 1 - 1/x``."""
    return 1 - recip(x)


def format_exponent(x: Optional[Ext]) -> str:
    if x is None:
        return ""
    if x == INF:
        return "inf"
    return str(Fraction(x))


@dataclass(frozen=True)
class ExponentTuple:
    theorem: str
    n: int
    q: Optional[Ext] = None
    r: Optional[Ext] = None
    qt: Optional[Ext] = None
    rt: Optional[Ext] = None
    s: Optional[Ext] = None
    k: Optional[Ext] = None
    gamma: Optional[Ext] = None

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown theorem tag {self.theorem!r}; expected one of {THEOREMS}")
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise BadExponent(f"dimension must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        need = REQUIRED[self.theorem]
        for name in OPTIONAL:
            val = getattr(self, name)
            if name not in need:
                if val is not None:
                    raise ExtraneousField(f"{name} is not used by {self.theorem}")
                continue
            if val is None:
                raise MissingField(f"{self.theorem} requires {name}")
            val = parse_exponent(val, allow_inf=name in LEBESGUE)
            if name in LEBESGUE and val < 1:
                raise BadExponent(f"{name} must lie in [1, inf], got {val}")
            object.__setattr__(self, name, val)

    @classmethod
    def build(cls, theorem: str, n: int, **values) -> "ExponentTuple":
        """Construct from loose input, dropping keys whose value is ``None``."""
        return cls(theorem, n, **{k: v for k, v in values.items() if v is not None})

    def values(self) -> dict:
        return {name: getattr(self, name) for name in REQUIRED[self.theorem]}

    def as_strings(self) -> dict:
        out = {"theorem": self.theorem, "n": str(self.n)}
        out.update({name: format_exponent(getattr(self, name)) for name in OPTIONAL})
        return out

    def sort_key(self):
        return (self.n,) + tuple(
            (0, 0) if getattr(self, f) is None else
            ((1, 0) if getattr(self, f) == INF else (0, getattr(self, f)))
            for f in OPTIONAL)

    def with_values(self, **changes) -> "ExponentTuple":
        return replace(self, **changes)

    def __str__(self):
        body = ", ".join(f"{k}={format_exponent(v)}" for k, v in self.values().items())
        return f"{self.theorem}(n={self.n}, {body})"


@dataclass(frozen=True)
class Violation:
    name: str
    slack: Fraction

    def __str__(self):
        return f"{self.name} (slack {self.slack})"


@dataclass(frozen=True)
class CheckResult:
    violations: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.passed

    def names(self) -> list:
        return [v.name for v in self.violations]

    def __str__(self):
        if self.passed:
            return "pass"
        return "fail: " + "; ".join(str(v) for v in self.violations)


class _Conditions:
    def __init__(self):
        self.violations = []

    def le(self, name, lhs, rhs):
        if not lhs <= rhs:
            self.violations.append(Violation(name, Fraction(lhs - rhs)))

    def lt(self, name, lhs, rhs):
        if not lhs < rhs:
            self.violations.append(Violation(name, Fraction(lhs - rhs)))

    def eq(self, name, lhs, rhs):
        if lhs != rhs:
            self.violations.append(Violation(name, Fraction(lhs - rhs)))

    def acceptable(self, name, a, b):
        # 1/q + 2/r < 1, or (q, r) = (inf, 2)
        if not (a + 2 * b < 1 or (a == 0 and b == Fraction(1, 2))):
            self.violations.append(Violation(name, Fraction(a + 2 * b - 1)))

    def result(self) -> CheckResult:
        return CheckResult(tuple(self.violations))


def _expect(t: ExponentTuple, theorem: str):
    if t.theorem != theorem:
        raise NotApplicable(f"expected a {theorem} tuple, got {t.theorem}")


def _finite_lebesgue(c, name, x):
    """``2 <= x < inf`` on the reciprocal ``1/x``."""
    c.le(f"{name}>=2", recip(x), Fraction(1, 2))
    c.lt(f"{name}<inf", 0, recip(x))


def check_wave_system(t: ExponentTuple) -> CheckResult:
    _expect(t, "wave_system")
    n = t.n
    a, b, at = recip(t.q), recip(t.r), recip(t.qt)
    c = _Conditions()
    c.le("n>=2", 2, n)
    c.le("q>=2", a, Fraction(1, 2))
    c.le("qt>=2", at, Fraction(1, 2))
    _finite_lebesgue(c, "r", t.r)
    if n in (2, 3):
        c.lt("qt>4/(n-1)", at, Fraction(n - 1, 4))
    c.le("wave_admissible(q,r)", a + Fraction(n - 1, 2) * b, Fraction(n - 1, 4))
    c.eq("scale_solution", a + n * b, Fraction(n, 2) - t.s)
    c.eq("scale_forcing", Fraction(n, 2) - t.s, conj_recip(t.qt) + n - 2 - t.k)
    return c.result()


def check_wave_scalar(t: ExponentTuple) -> CheckResult:
    _expect(t, "wave_scalar")
    n = t.n
    a, b, at, bt = recip(t.q), recip(t.r), recip(t.qt), recip(t.rt)
    c = _Conditions()
    c.le("n>=2", 2, n)
    c.le("q>=2", a, Fraction(1, 2))
    c.le("qt>=2", at, Fraction(1, 2))
    _finite_lebesgue(c, "r", t.r)
    _finite_lebesgue(c, "rt", t.rt)
    c.le("wave_admissible(q,r)", a + Fraction(n - 1, 2) * b, Fraction(n - 1, 4))
    c.le("wave_admissible(qt,rt)", at + Fraction(n - 1, 2) * bt, Fraction(n - 1, 4))
    c.eq("scale_solution", a + n * b, Fraction(n, 2) - t.s)
    c.eq("scale_forcing", Fraction(n, 2) - t.s,
         conj_recip(t.qt) + n * conj_recip(t.rt) - 2 - t.gamma)
    return c.result()


def _require_3d(t: ExponentTuple):
    if t.n != 3:
        raise WrongDimension(f"{t.theorem} is stated for n = 3, got n = {t.n}")


def check_inhomo_wave3d(t: ExponentTuple) -> CheckResult:
    _expect(t, "inhomo_wave3d")
    _require_3d(t)
    a, b, at = recip(t.q), recip(t.r), recip(t.qt)
    c = _Conditions()
    c.lt("q>1", a, 1)
    c.lt("qt>1", at, 1)
    _finite_lebesgue(c, "r", t.r)
    c.lt("sum<min(1,(k+1)/2)", a + at, min(Fraction(1), (t.k + 1) / 2))
    c.acceptable("wave_acceptable(q,r)", a, b)
    c.eq("scale", a + 3 * b, 2 - t.k - at)
    return c.result()


def check_taggart(t: ExponentTuple) -> CheckResult:
    _expect(t, "taggart")
    _require_3d(t)
    a, b, at, bt = recip(t.q), recip(t.r), recip(t.qt), recip(t.rt)
    c = _Conditions()
    c.lt("q>1", a, 1)
    c.lt("qt>1", at, 1)
    _finite_lebesgue(c, "r", t.r)
    _finite_lebesgue(c, "rt", t.rt)
    c.lt("sum<1", a + at, 1)
    c.le("sum<=(gamma+1)/2", a + at, (t.gamma + 1) / 2)
    c.acceptable("wave_acceptable(q,r)", a, b)
    c.acceptable("wave_acceptable(qt,rt)", at, bt)
    c.eq("scale", a + 3 * b, 2 - t.gamma - at - 3 * bt)
    return c.result()


def check_schrodinger(t: ExponentTuple) -> CheckResult:
    _expect(t, "schrodinger")
    n = t.n
    a, b, at = recip(t.q), recip(t.r), recip(t.qt)
    c = _Conditions()
    c.le("n>=2", 2, n)
    c.le("q>=2", a, Fraction(1, 2))
    c.le("qt>=2", at, Fraction(1, 2))
    _finite_lebesgue(c, "r", t.r)
    c.le("s>=0", 0, t.s)
    c.lt("k>s", t.s, t.k)
    c.eq("scale_solution", 2 * a + n * b, Fraction(n, 2) - t.s)
    c.eq("scale_forcing", 2 * at, Fraction(n, 2) - t.k + t.s)
    return c.result()


def check_schrodinger_scalar(t: ExponentTuple) -> CheckResult:
    _expect(t, "schrodinger_scalar")
    n = t.n
    a, b, at, bt = recip(t.q), recip(t.r), recip(t.qt), recip(t.rt)
    c = _Conditions()
    c.le("n>=2", 2, n)
    c.le("q>=2", a, Fraction(1, 2))
    c.le("qt>=2", at, Fraction(1, 2))
    _finite_lebesgue(c, "r", t.r)
    _finite_lebesgue(c, "rt", t.rt)
    c.le("s>=0", 0, t.s)
    c.lt("gamma>s", t.s, t.gamma)
    c.eq("scale_solution", 2 * a + n * b, Fraction(n, 2) - t.s)
    c.eq("scale_forcing", 2 * at + n * bt, Fraction(n, 2) - t.gamma + t.s)
    return c.result()


CHECKERS = {
    "wave_system": check_wave_system,
    "wave_scalar": check_wave_scalar,
    "inhomo_wave3d": check_inhomo_wave3d,
    "taggart": check_taggart,
    "schrodinger": check_schrodinger,
    "schrodinger_scalar": check_schrodinger_scalar,
}


def check(t: ExponentTuple) -> CheckResult:
    """Dispatch to the checker named by ``t.theorem``."""
    return CHECKERS[t.theorem](t)


# ---------------------------------------------------------------------------
# constructions from the proofs


class AlphaChoice(NamedTuple):
    alpha: Fraction
    rt: Fraction
    gamma: Fraction


def _require_pass(t: ExponentTuple, theorem: str):
    _expect(t, theorem)
    res = check(t)
    if not res.passed:
        raise NotApplicable(f"{t} does not satisfy its hypotheses: {res}")


def select_alpha_wave(t: ExponentTuple) -> AlphaChoice:
    """Upper endpoint ``alpha = n/2 - 2n/((n-1) qt)``, ``rt = n/alpha``, ``gamma = k - alpha``."""
    _require_pass(t, "wave_system")
    n = t.n
    alpha = Fraction(n, 2) - Fraction(2 * n, n - 1) * recip(t.qt)
    return AlphaChoice(alpha, n / alpha, t.k - alpha)


def select_alpha_inhomo(t: ExponentTuple) -> AlphaChoice:
    """Half of the smaller slack: ``alpha = min{(k+1) - 2(1/q + 1/qt), (3/2)(1 - 1/qt)} / 2``."""
    _require_pass(t, "inhomo_wave3d")
    total = recip(t.q) + recip(t.qt)
    alpha = min((t.k + 1) - 2 * total, Fraction(3, 2) * (1 - recip(t.qt))) / 2
    return AlphaChoice(alpha, 3 / alpha, t.k - alpha)


def select_alpha_schrod(t: ExponentTuple) -> AlphaChoice:
    """``alpha = min{k - s, n/2} / 2``, ``rt = n/alpha``, ``gamma = k - alpha``.

    The endpoint ``alpha = k - s`` would give ``gamma = s``, which the scalar
    estimate excludes, so the midpoint of the allowed interval is used.  The
    forcing identity gives ``k - s = n/2 - 2/qt <= n/2``, so in practice
    ``alpha = (k - s)/2``.
    """
    _require_pass(t, "schrodinger")
    alpha = min(t.k - t.s, Fraction(t.n, 2)) / 2
    return AlphaChoice(alpha, t.n / alpha, t.k - alpha)


def reduced_tuple(t: ExponentTuple, choice: AlphaChoice) -> ExponentTuple:
    """The scalar-estimate tuple that an :class:`AlphaChoice` produces from ``t``."""
    if t.theorem == "wave_system":
        return ExponentTuple("wave_scalar", t.n, q=t.q, r=t.r, qt=t.qt, rt=choice.rt,
                             s=t.s, gamma=choice.gamma)
    if t.theorem == "inhomo_wave3d":
        return ExponentTuple("taggart", t.n, q=t.q, r=t.r, qt=t.qt, rt=choice.rt,
                             gamma=choice.gamma)
    if t.theorem == "schrodinger":
        return ExponentTuple("schrodinger_scalar", t.n, q=t.q, r=t.r, qt=t.qt, rt=choice.rt,
                             s=t.s, gamma=choice.gamma)
    raise NotApplicable(f"no reduction defined for {t.theorem}")


SELECTORS = {
    "wave_system": select_alpha_wave,
    "inhomo_wave3d": select_alpha_inhomo,
    "schrodinger": select_alpha_schrod,
}


def _bound_max(x, y):
    if x[0] != y[0]:
        return x if x[0] > y[0] else y
    return (x[0], x[1] or y[1])


def _bound_min(x, y):
    if x[0] != y[0]:
        return x if x[0] < y[0] else y
    return (x[0], x[1] or y[1])


def taggart_reduction(t: ExponentTuple):
    """Exponents ``r1 <= r``, ``rt1 <= rt`` with ``1/r1 + 1/rt1 = 1 - 1/q - 1/qt``.

    Both ``(q, r1)`` and ``(qt, rt1)`` satisfy the acceptability condition.  The
    sum is split evenly when possible; otherwise ``1/r1`` moves to the nearest
    admissible endpoint, or to the middle of the admissible interval when that
    endpoint is excluded.
    """
    _require_pass(t, "taggart")
    a, b, at, bt = recip(t.q), recip(t.r), recip(t.qt), recip(t.rt)
    S = 1 - a - at
    # bounds on x = 1/r1 as (value, strict)
    hi_x = ((1 - a) / 2, True) if a > 0 else (Fraction(1, 2), False)
    hi_y = ((1 - at) / 2, True) if at > 0 else (Fraction(1, 2), False)
    lower = _bound_max((b, False), (S - hi_y[0], hi_y[1]))
    upper = _bound_min(hi_x, (S - bt, False))
    if lower[0] > upper[0] or (lower[0] == upper[0] and (lower[1] or upper[1])):
        raise Infeasible(f"no admissible split for {t}")
    x = S / 2
    if x < lower[0] or (x == lower[0] and lower[1]):
        x = lower[0] if not lower[1] else (lower[0] + upper[0]) / 2
    elif x > upper[0] or (x == upper[0] and upper[1]):
        x = upper[0] if not upper[1] else (lower[0] + upper[0]) / 2
    y = S - x
    return 1 / x, 1 / y


# ---------------------------------------------------------------------------
# enumeration

FREE = {
    "wave_system": ("q", "r", "qt"),
    "wave_scalar": ("q", "r", "qt", "rt"),
    "inhomo_wave3d": ("q", "r", "qt"),
    "taggart": ("q", "r", "qt", "rt"),
    "schrodinger": ("q", "r", "qt"),
    "schrodinger_scalar": ("q", "r", "qt", "rt"),
}

# reciprocal ranges implied by each checker's box constraints:
# (lower, lower_strict, upper, upper_strict)
_HALF = Fraction(1, 2)
_BOX = {
    "wave_system": {"q": (0, False, _HALF, False), "r": (0, True, _HALF, False),
                    "qt": (0, False, _HALF, False)},
    "wave_scalar": {"q": (0, False, _HALF, False), "r": (0, True, _HALF, False),
                    "qt": (0, False, _HALF, False), "rt": (0, True, _HALF, False)},
    "inhomo_wave3d": {"q": (0, False, 1, True), "r": (0, True, _HALF, False),
                      "qt": (0, False, 1, True)},
    "taggart": {"q": (0, False, 1, True), "r": (0, True, _HALF, False),
                "qt": (0, False, 1, True), "rt": (0, True, _HALF, False)},
    "schrodinger": {"q": (0, False, _HALF, False), "r": (0, True, _HALF, False),
                    "qt": (0, False, _HALF, False)},
    "schrodinger_scalar": {"q": (0, False, _HALF, False), "r": (0, True, _HALF, False),
                           "qt": (0, False, _HALF, False), "rt": (0, True, _HALF, False)},
}


def reciprocal_grid(max_denominator: int) -> list:
    """All rationals in ``[0, 1]`` with denominator at most ``max_denominator``."""
    if max_denominator < 1:
        return []
    return sorted({Fraction(p, d) for d in range(1, max_denominator + 1) for p in range(d + 1)})


def _in_box(x, box):
    lo, lo_strict, hi, hi_strict = box
    return (x > lo if lo_strict else x >= lo) and (x < hi if hi_strict else x <= hi)


def _from_recip(x: Fraction) -> Ext:
    return INF if x == 0 else 1 / x


def _dependent(theorem: str, n: int, a, b, at, bt) -> dict:
    """Regularity indices forced by the scale identities."""
    h = Fraction(n, 2)
    if theorem == "wave_system":
        s = h - a - n * b
        return {"s": s, "k": (1 - at) + n - 2 - (h - s)}
    if theorem == "wave_scalar":
        s = h - a - n * b
        return {"s": s, "gamma": (1 - at) + n * (1 - bt) - 2 - (h - s)}
    if theorem == "inhomo_wave3d":
        return {"k": 2 - at - a - 3 * b}
    if theorem == "taggart":
        return {"gamma": 2 - at - 3 * bt - a - 3 * b}
    if theorem == "schrodinger":
        s = h - 2 * a - n * b
        return {"s": s, "k": h + s - 2 * at}
    s = h - 2 * a - n * b
    return {"s": s, "gamma": h + s - 2 * at - n * bt}


def _pair_ok(theorem: str, n: int, a, b) -> bool:
    """Pair condition on ``(1/q, 1/r)`` that the checker also imposes."""
    if theorem in ("wave_system", "wave_scalar"):
        return a + Fraction(n - 1, 2) * b <= Fraction(n - 1, 4)
    if theorem in ("inhomo_wave3d", "taggart"):
        return a + 2 * b < 1 or (a == 0 and b == _HALF)
    return True


def enumerate_exponents(theorem: str, n: int, max_denominator: int = 8, values=None) -> list:
    """All passing tuples whose free exponents have reciprocals on a rational grid.

    The free exponents are ``q, r, qt`` (and ``rt`` for the scalar systems);
    ``1/q`` etc. range over ``values`` (default :func:`reciprocal_grid`) and
    the regularity indices are solved from the scale identities.  The output
    is sorted and deterministic.
    """
    if theorem not in THEOREMS:
        raise ValueError(f"unknown theorem tag {theorem!r}")
    if theorem in ("inhomo_wave3d", "taggart") and n != 3:
        raise WrongDimension(f"{theorem} is stated for n = 3")
    grid = reciprocal_grid(max_denominator) if values is None else sorted(set(values))
    box = _BOX[theorem]
    cand = {name: [x for x in grid if _in_box(x, box[name])] for name in FREE[theorem]}
    scalar = "rt" in FREE[theorem]
    first = [(a, b) for a in cand["q"] for b in cand["r"] if _pair_ok(theorem, n, a, b)]
    second = ([(at, bt) for at in cand["qt"] for bt in cand["rt"] if _pair_ok(theorem, n, at, bt)]
              if scalar else [(at, None) for at in cand["qt"]])
    out = []
    checker = CHECKERS[theorem]
    for a, b in first:
        for at, bt in second:
            if theorem in ("inhomo_wave3d", "taggart") and a + at >= 1:
                continue
            exps = {"q": _from_recip(a), "r": _from_recip(b), "qt": _from_recip(at)}
            if scalar:
                exps["rt"] = _from_recip(bt)
            exps.update(_dependent(theorem, n, a, b, at, bt))
            t = ExponentTuple(theorem, n, **exps)
            if checker(t).passed:
                out.append(t)
    out.sort(key=ExponentTuple.sort_key)
    return out


CSV_COLUMNS = ("theorem", "n") + OPTIONAL


def tuples_to_csv(tuples) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for t in tuples:
        row = t.as_strings()
        lines.append(",".join(row[c] for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def tuple_from_row(row: dict) -> ExponentTuple:
    vals = {c: row[c] for c in OPTIONAL if row.get(c, "") not in ("", None)}
    return ExponentTuple(row["theorem"], int(row["n"]), **vals)
