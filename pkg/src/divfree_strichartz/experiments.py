"""End-to-end checks of the estimates on seeded data families.

An estimate ``LHS <= C * RHS`` with an unspecified constant cannot be verified
directly.  Each experiment instead evaluates both sides on a seeded family
of band-limited trials and reports the ratios.  Boundedness is judged by two
signatures:

* refinement stability: the largest ratio grows by at most ``max_growth``
  when the grid is refined with the data family held fixed;
* scaling stability: under the dilation ``x -> lam x``, ``t -> lam t`` the
  ratio moves by at most ``max_spread``.

Forcings are separable, ``f(t, x) = sum_j chi_j(t) F_j(x)``, with smooth bumps
``chi_j`` supported inside ``(0, T)``.  Random data are keyed by lattice index
with a fixed cutoff, so the same seed describes the same trigonometric
polynomial on every grid of a refinement sweep.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, ExponentCheckFailed, StrichartzError
from .evolution import (DUHAMEL_RULES, SpaceTimeField, WaveData,
                        frame_lebesgue_norms, frame_sobolev_norms,
                        schrodinger_solve, time_norm, wave_solve)
from .exponents import INF, ExponentTuple, check, parse_exponent
from .fields import (GENERATOR_KINDS, DivFreeGenerator, jacobian_det,
                     l1_norm, lemma1_ratio, random_field, stream_function,
                     vs_ratio)
from .spectral_core import (Grid, ScalarField, VectorField, dealiased_product,
                            fractional_laplacian, lebesgue_norm, partial,
                            riesz_transform, sobolev_norm)

SCHEMA_VERSION = 1

EXPERIMENTS = ("prop1", "thm2", "thm5", "thm7", "lemma1", "vanschaftingen",
               "wente", "wente_wave", "scaling_sweep", "riesz_demo")

# condition system that guards each experiment's exponent tuple
TUPLE_THEOREM = {"thm2": "wave_system", "thm5": "inhomo_wave3d", "thm7": "schrodinger"}

PLANAR = ("prop1", "lemma1", "wente", "wente_wave")


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment run; see ``docs/formats.md`` for the JSON layout."""

    experiment: str
    dim: int = 2
    levels: tuple = (64, 128)
    period: float = 2 * math.pi
    T: float = 2 * math.pi
    M: int = 256
    rule: str = "cubic"
    exponents: Optional[dict] = None
    generator: str = "projected_random"
    seed: int = 0
    trials: int = 50
    beta: float = 2.0
    cutoff: int = 16
    forcing_terms: int = 2
    data: str = "random"
    forcing: str = "random"
    data_amplitude: float = 1.0
    alphas: tuple = (0.25, 0.5, 1.0, 1.5)
    scales: tuple = (1, 2, 4)
    base: str = "thm2"
    widths: tuple = (0.4, 0.2, 0.1)
    max_growth: float = 0.15
    max_spread: float = 0.05
    output: Optional[str] = None

    def __post_init__(self):
        def fail(msg):
            raise ConfigError(msg)

        if self.experiment not in EXPERIMENTS:
            fail(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        for name in ("levels", "alphas", "scales", "widths"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.levels:
            fail("at least one grid level is required")
        for N in self.levels:
            if not isinstance(N, int) or N < 4 or N & (N - 1):
                fail(f"grid level {N!r} is not a power of two >= 4")
        if list(self.levels) != sorted(set(self.levels)):
            fail("grid levels must be strictly increasing")
        if not isinstance(self.dim, int) or self.dim < 1:
            fail("dim must be a positive integer")
        effective = self.base if self.experiment == "scaling_sweep" else self.experiment
        if self.experiment == "scaling_sweep" and self.base not in ("prop1", "thm2"):
            fail("scaling_sweep base must be 'prop1' or 'thm2'")
        if effective in PLANAR and self.dim != 2:
            fail(f"{effective} is a two-dimensional experiment")
        if effective == "thm5" and self.dim != 3:
            fail("thm5 is a three-dimensional experiment")
        if effective in ("thm2", "thm7") and self.dim < 2:
            fail(f"{effective} needs dim >= 2")
        if self.period <= 0 or self.T <= 0 or not math.isfinite(self.T):
            fail("period and T must be positive")
        if not isinstance(self.M, int) or self.M < 1:
            fail("M must be a positive integer")
        if self.rule not in DUHAMEL_RULES:
            fail(f"rule must be one of {DUHAMEL_RULES}")
        if self.generator not in GENERATOR_KINDS:
            fail(f"generator must be one of {GENERATOR_KINDS}")
        if self.trials < 1 or self.forcing_terms < 1:
            fail("trials and forcing_terms must be positive")
        if self.data not in ("random", "zero") or self.forcing not in ("random", "zero"):
            fail("data and forcing must be 'random' or 'zero'")
        if self.experiment != "riesz_demo":
            limit = min(self.levels) // (4 if effective in ("wente", "wente_wave") else 3)
            if not 1 <= self.cutoff <= limit:
                fail(f"cutoff {self.cutoff} must lie in [1, {limit}] for the coarsest level")
        if effective in TUPLE_THEOREM:
            if not self.exponents:
                fail(f"{effective} requires an exponents block")
            try:
                self.exponent_tuple()
            except StrichartzError as exc:
                fail(f"bad exponents: {exc}")
        for a in self.alphas:
            if not 0 < a < self.dim:
                fail(f"alpha {a} outside (0, {self.dim})")
        for lam in self.scales:
            if isinstance(lam, bool) or not isinstance(lam, int) or lam < 1:
                fail(f"scales must be positive integers, got {lam!r}")
        if any(w <= 0 for w in self.widths):
            fail("widths must be positive")
        for name in ("max_growth", "max_spread"):
            tol = getattr(self, name)
            if not isinstance(tol, (int, float)) or not 0 <= tol < math.inf:
                fail(f"{name} must be a finite non-negative number")

    def exponent_tuple(self) -> Optional[ExponentTuple]:
        effective = self.base if self.experiment == "scaling_sweep" else self.experiment
        tag = TUPLE_THEOREM.get(effective)
        if tag is None:
            return None
        return ExponentTuple(tag, self.dim, **{k: parse_exponent(v) for k, v in self.exponents.items()})

    # JSON layout -------------------------------------------------------

    _LAYOUT = {
        "grid": ("dim", "levels", "period"),
        "time": ("T", "M", "rule"),
        "family": ("generator", "seed", "trials", "beta", "cutoff", "forcing_terms",
                   "data", "forcing", "data_amplitude"),
        "sweep": ("alphas", "scales", "base", "widths"),
        "tolerances": ("max_growth", "max_spread"),
    }

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        raw = dict(raw)
        version = raw.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}")
        if "experiment" not in raw:
            raise ConfigError("missing 'experiment'")
        kwargs = {"experiment": raw.pop("experiment")}
        for key in ("exponents", "output"):
            if key in raw:
                kwargs[key] = raw.pop(key)
        for section, names in cls._LAYOUT.items():
            block = raw.pop(section, {})
            if not isinstance(block, dict):
                raise ConfigError(f"'{section}' must be an object")
            unknown = set(block) - set(names)
            if unknown:
                raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
            kwargs.update(block)
        if raw:
            raise ConfigError(f"unknown top-level keys: {sorted(raw)}")
        if kwargs.get("exponents") is not None:
            if not isinstance(kwargs["exponents"], dict):
                raise ConfigError("'exponents' must be an object")
            kwargs["exponents"] = {k: str(v) for k, v in kwargs["exponents"].items()}
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION, "experiment": self.experiment}
        for section, names in self._LAYOUT.items():
            out[section] = {n: (list(getattr(self, n)) if isinstance(getattr(self, n), tuple)
                                else getattr(self, n)) for n in names}
        out["exponents"] = dict(sorted(self.exponents.items())) if self.exponents else None
        out["output"] = self.output
        return out

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, excluding the output location."""
        payload = self.to_dict()
        payload.pop("output")
        text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def with_changes(self, **changes) -> "ExperimentConfig":
        return ExperimentConfig(**{**{f: getattr(self, f) for f in self.__dataclass_fields__}, **changes})


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    N: int
    M: int
    lhs: float
    rhs: float
    ratio: Optional[float]
    label: str = ""
    flag: str = ""


CSV_COLUMNS = ("seed", "N", "M", "LHS", "RHS", "ratio", "label", "flag")


@dataclass
class RatioReport:
    experiment: str
    digest: str
    config: dict
    trials: list = field(default_factory=list)
    level_max: dict = field(default_factory=dict)
    growth: Optional[float] = None
    scaling: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def ratios(self, N: Optional[int] = None) -> np.ndarray:
        return np.array([t.ratio for t in self.trials
                         if t.ratio is not None and (N is None or t.N == N)])

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "digest": self.digest,
            "config": self.config,
            "trials": [asdict(t) for t in self.trials],
            "level_max": {str(k): v for k, v in self.level_max.items()},
            "growth": self.growth,
            "scaling": {str(k): v for k, v in self.scaling.items()},
            "checks": self.checks,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RatioReport":
        return cls(d["experiment"], d["digest"], d["config"],
                   [TrialRecord(**t) for t in d["trials"]],
                   {int(k): v for k, v in d["level_max"].items()}, d["growth"],
                   {int(k): v for k, v in d["scaling"].items()}, d["checks"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for t in self.trials:
            w.writerow([t.seed, t.N, t.M, repr(t.lhs), repr(t.rhs),
                        "" if t.ratio is None else repr(t.ratio), t.label, t.flag])
        return buf.getvalue()

    def write(self, directory, stem: Optional[str] = None) -> tuple:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        stem = stem or self.experiment
        jpath, cpath = directory / f"{stem}_report.json", directory / f"{stem}_trials.csv"
        jpath.write_text(self.to_json())
        cpath.write_text(self.to_csv())
        return jpath, cpath


def _record(seed, N, M, lhs, rhs, label="") -> TrialRecord:
    lhs, rhs = float(lhs), float(rhs)
    if lhs == 0 and rhs == 0:
        return TrialRecord(seed, N, M, lhs, rhs, None, label, "zero_data")
    ratio = lhs / rhs if rhs > 0 else math.inf
    return TrialRecord(seed, N, M, lhs, rhs, ratio, label, "")


def refinement_growth(level_max: dict) -> Optional[float]:
    """Largest relative increase of the max ratio between consecutive levels."""
    keys = sorted(level_max)
    vals = [level_max[k] for k in keys]
    if len(vals) < 2 or any(v is None for v in vals):
        return None
    return max(b / a - 1.0 for a, b in zip(vals, vals[1:]))


def _finalize(cfg: ExperimentConfig, trials: list, refinement: bool = True) -> RatioReport:
    rep = RatioReport(cfg.experiment, cfg.digest(), cfg.to_dict(), trials)
    for N in sorted({t.N for t in trials}):
        r = rep.ratios(N)
        rep.level_max[N] = float(r.max()) if r.size else None
    rep.checks["ratios_finite"] = all(
        t.flag == "zero_data" or (t.rhs > 0 and math.isfinite(t.ratio) and t.ratio >= 0)
        for t in trials)
    if refinement:
        rep.growth = refinement_growth(rep.level_max)
        if rep.growth is not None:
            rep.checks["refinement_stable"] = rep.growth <= cfg.max_growth
    return rep


def _require_tuple(cfg: ExperimentConfig) -> Optional[ExponentTuple]:
    t = cfg.exponent_tuple()
    if t is not None:
        res = check(t)
        if not res.passed:
            raise ExponentCheckFailed(res)
    return t


def _expect(cfg: ExperimentConfig, name: str):
    if cfg.experiment != name:
        raise ConfigError(f"config is for {cfg.experiment}, not {name}")


# ---------------------------------------------------------------------------
# data families


def bump(tau) -> np.ndarray:
    """``exp(1 - 1/(1 - tau^2))`` on ``|tau| < 1``, zero outside; peak value 1."""
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    inside = np.abs(tau) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - tau[inside] ** 2))
    return out


def time_profiles(seed: int, count: int, fractions) -> np.ndarray:
    """Smooth bumps in ``t/T``; centres in ``[0.35, 0.65]``, half-widths in ``[0.2, 0.3]``."""
    fractions = np.asarray(fractions, dtype=float)
    out = np.empty((count, fractions.size))
    for j in range(count):
        rng = np.random.default_rng((seed, 7919, j))
        c, w = rng.uniform(0.35, 0.65), rng.uniform(0.2, 0.3)
        out[j] = bump((fractions - c) / w)
    return out


def _zero_vector(grid: Grid) -> VectorField:
    return VectorField.from_coefficients(grid, np.zeros((grid.dim,) + grid.shape, dtype=complex))


def _forcing_fields(cfg: ExperimentConfig, grid: Grid, seed: int, count: int) -> list:
    if cfg.forcing == "zero":
        return []
    return [DivFreeGenerator(cfg.generator, (seed, j), cfg.beta, cfg.cutoff).generate(grid)
            for j in range(count)]


def _vector_data(cfg: ExperimentConfig, grid: Grid, seed: int):
    if cfg.data == "zero":
        return _zero_vector(grid), _zero_vector(grid)
    a = cfg.data_amplitude
    u0 = random_field(grid, (seed, 101), grid.dim, cfg.cutoff, cfg.beta) * a
    u1 = random_field(grid, (seed, 102), grid.dim, cfg.cutoff, cfg.beta) * a
    return u0, u1


def _scalar_data(cfg: ExperimentConfig, grid: Grid, seed: int):
    if cfg.data == "zero":
        return ScalarField.zeros(grid), ScalarField.zeros(grid)
    a = cfg.data_amplitude
    return (random_field(grid, (seed, 101), None, cfg.cutoff, cfg.beta) * a,
            random_field(grid, (seed, 102), None, cfg.cutoff, cfg.beta) * a)


def _times(T: float, M: int) -> np.ndarray:
    return np.linspace(0.0, T, M + 1)


def _forcing(times, profiles, fields) -> Optional[SpaceTimeField]:
    if not fields:
        return None
    return SpaceTimeField.from_separable(times, profiles[:len(fields)], fields)


def forcing_l1_profile(fields: Sequence, profiles: np.ndarray, order: float = 0.0) -> np.ndarray:
    """``||(-Delta)^{order/2} f(t)||_{L^1_x}`` at each time sample of a separable forcing."""
    profiles = np.atleast_2d(profiles)
    if not fields:
        return np.zeros(profiles.shape[1])
    shaped = [fractional_laplacian(F, order) for F in fields]
    if len(shaped) == 1:
        return np.abs(profiles[0]) * lebesgue_norm(shaped[0], 1)
    grid = fields[0].grid
    stack = np.stack([F.data if isinstance(F, VectorField) else F.samples[None] for F in shaped])
    out = np.empty(profiles.shape[1])
    for i in range(profiles.shape[1]):
        g = np.tensordot(profiles[:len(fields), i], stack, axes=1)
        out[i] = np.sum(np.sqrt(np.sum(np.abs(g) ** 2, axis=0))) * grid.cell_volume
    return out


def _exp(x) -> float:
    return math.inf if x == INF else float(x)


def _conj(x) -> float:
    """Holder conjugate of an exponent in ``[1, inf]``."""
    if x == INF:
        return 1.0
    x = float(x)
    return math.inf if x == 1 else x / (x - 1.0)


# ---------------------------------------------------------------------------
# both sides of each estimate


def prop1_sides(data: WaveData, fields, profiles, times, rule: str = "cubic") -> tuple:
    """Energy-level bound for the planar wave system with divergence-free forcing.

    ``max_t ||u||_{L^2} + max_t ||u_t||_{H^-1}`` against
    ``||u0||_{L^2} + ||u1||_{H^-1} + int ||f(t)||_{L^1} dt``.
    """
    f = _forcing(times, profiles, fields)
    u, ut = wave_solve(data, f, times if f is None else None, rule)
    lhs = frame_sobolev_norms(u, 0.0).max() + frame_sobolev_norms(ut, -1.0).max()
    rhs = (sobolev_norm(data.u0, 0.0) + sobolev_norm(data.u1, -1.0)
           + time_norm(forcing_l1_profile(fields, profiles), times, 1.0))
    return float(lhs), float(rhs)


def thm2_sides(t: ExponentTuple, data: WaveData, fields, profiles, times,
               rule: str = "cubic") -> tuple:
    """Strichartz bound for the wave system with ``L^1_x`` forcing norm."""
    q, r, s, k = _exp(t.q), _exp(t.r), float(t.s), float(t.k)
    f = _forcing(times, profiles, fields)
    u, ut = wave_solve(data, f, times if f is None else None, rule)
    lhs = (time_norm(frame_lebesgue_norms(u, r), u.times, q)
           + frame_sobolev_norms(u, s).max() + frame_sobolev_norms(ut, s - 1).max())
    rhs = (sobolev_norm(data.u0, s) + sobolev_norm(data.u1, s - 1)
           + time_norm(forcing_l1_profile(fields, profiles, k), times, _conj(t.qt)))
    return float(lhs), float(rhs)


def thm5_sides(t: ExponentTuple, grid: Grid, fields, profiles, times,
               rule: str = "cubic") -> tuple:
    """Zero-data three-dimensional bound ``||u||_{L^q L^r} <= C ||D^k f||_{L^qt' L^1}``."""
    q, r, k = _exp(t.q), _exp(t.r), float(t.k)
    f = _forcing(times, profiles, fields)
    zero = _zero_vector(grid)
    if f is None:
        return 0.0, 0.0
    u, _ = wave_solve(WaveData(zero, zero), f, None, rule)
    lhs = time_norm(frame_lebesgue_norms(u, r), u.times, q)
    rhs = time_norm(forcing_l1_profile(fields, profiles, k), times, _conj(t.qt))
    return float(lhs), float(rhs)


def thm7_sides(t: ExponentTuple, u0, fields, profiles, times, rule: str = "cubic") -> tuple:
    """Strichartz bound for the Schrodinger system with ``L^1_x`` forcing norm."""
    q, r, s, k = _exp(t.q), _exp(t.r), float(t.s), float(t.k)
    f = _forcing(times, profiles, fields)
    u = schrodinger_solve(u0, f, times if f is None else None, rule)
    lhs = frame_sobolev_norms(u, s).max() + time_norm(frame_lebesgue_norms(u, r), u.times, q)
    rhs = (sobolev_norm(u0, s)
           + time_norm(forcing_l1_profile(fields, profiles, k), times, _conj(t.qt)))
    return float(lhs), float(rhs)


def wente_sides(F: VectorField) -> tuple:
    """``||(-Delta)^{-1/2} det grad F||_{L^2}`` against ``||grad F||_{L^2}^2``."""
    J = _mean_free(jacobian_det(F))
    return sobolev_norm(J, -1.0), sobolev_norm(F, 1.0) ** 2


def _mean_free(J: ScalarField) -> ScalarField:
    # the torus integral of a Jacobian vanishes; drop the roundoff residue
    if abs(J.mean) > 1e-10 * max(J.max_abs(), 1e-300):
        raise AssertionError(f"Jacobian determinant has mean {J.mean}")
    c = J.coefficients.copy()
    c[(0,) * J.grid.dim] = 0.0
    return ScalarField.from_coefficients(J.grid, c)


def jacobian_cross(A: VectorField, B: VectorField) -> ScalarField:
    """Mixed term ``D(A,B) + D(B,A)`` of ``det grad (A + B)``, ``D(A,B) = d1A1 d2B2 - d2A1 d1B2``."""
    A1, A2 = A.components
    B1, B2 = B.components
    terms = (dealiased_product(partial(A1, 1), partial(B2, 2))
             - dealiased_product(partial(A1, 2), partial(B2, 1))
             + dealiased_product(partial(B1, 1), partial(A2, 2))
             - dealiased_product(partial(B1, 2), partial(A2, 1)))
    return terms


def wente_wave_sides(data: WaveData, A: VectorField, B: VectorField, profiles, times,
                     rule: str = "cubic") -> tuple:
    """Scalar wave equation driven by ``det grad F``, ``F(t) = chi_1(t) A + chi_2(t) B``.

    The d'Alembertian is ``-d_t^2 + Delta``, so the solver receives ``-det grad F``.
    The right side integrates ``||grad F(t)||_{L^2}^2`` in time.
    """
    a, b = np.atleast_2d(profiles)[:2]
    parts = [_mean_free(jacobian_det(A)), _mean_free(jacobian_cross(A, B)), _mean_free(jacobian_det(B))]
    f = SpaceTimeField.from_separable(times, np.stack([a * a, a * b, b * b]), [-p for p in parts])
    u, ut = wave_solve(data, f, None, rule)
    lhs = frame_sobolev_norms(u, 0.0).max() + frame_sobolev_norms(ut, -1.0).max()
    gram = _dirichlet_gram(A, B)
    energy = gram[0, 0] * a * a + 2 * gram[0, 1] * a * b + gram[1, 1] * b * b
    rhs = sobolev_norm(data.u0, 0.0) + sobolev_norm(data.u1, -1.0) + time_norm(energy, times, 1.0)
    return float(lhs), float(rhs)


def _dirichlet_gram(A: VectorField, B: VectorField) -> np.ndarray:
    grid = A.grid
    w = grid.kmag ** 2
    ca, cb = A.coefficients, B.coefficients
    g = np.empty((2, 2))
    g[0, 0] = np.sum(w * np.abs(ca) ** 2)
    g[1, 1] = np.sum(w * np.abs(cb) ** 2)
    g[0, 1] = g[1, 0] = np.sum(w * np.real(ca * np.conj(cb)))
    return g * grid.volume


# ---------------------------------------------------------------------------
# experiments


def _grid(cfg: ExperimentConfig, N: int, lam: int = 1) -> Grid:
    return Grid(cfg.dim, N, cfg.period / lam)


def _seeds(cfg: ExperimentConfig) -> range:
    return range(cfg.seed, cfg.seed + cfg.trials)


def _wave_trial(cfg: ExperimentConfig, kind: str, t: Optional[ExponentTuple], N: int,
                seed: int, lam: int = 1) -> tuple:
    """Both sides for one seeded trial; ``lam`` dilates space and time by ``1/lam``."""
    grid = _grid(cfg, N, lam)
    times = _times(cfg.T / lam, cfg.M)
    profiles = time_profiles(seed, cfg.forcing_terms, times / times[-1])
    fields = [F * lam ** 2 for F in _forcing_fields(cfg, grid, seed, cfg.forcing_terms)]
    u0, u1 = _vector_data(cfg, grid, seed)
    data = WaveData(u0, u1 * lam)
    if kind == "prop1":
        return prop1_sides(data, fields, profiles, times, cfg.rule)
    return thm2_sides(t, data, fields, profiles, times, cfg.rule)


def run_prop1(cfg: ExperimentConfig) -> RatioReport:
    _expect(cfg, "prop1")
    trials = [_record(seed, N, cfg.M, *_wave_trial(cfg, "prop1", None, N, seed))
              for N in cfg.levels for seed in _seeds(cfg)]
    return _finalize(cfg, trials)


def run_thm2(cfg: ExperimentConfig) -> RatioReport:
    _expect(cfg, "thm2")
    t = _require_tuple(cfg)
    trials = [_record(seed, N, cfg.M, *_wave_trial(cfg, "thm2", t, N, seed))
              for N in cfg.levels for seed in _seeds(cfg)]
    return _finalize(cfg, trials)


def run_thm5(cfg: ExperimentConfig) -> RatioReport:
    _expect(cfg, "thm5")
    t = _require_tuple(cfg)
    trials = []
    for N in cfg.levels:
        grid = _grid(cfg, N)
        times = _times(cfg.T, cfg.M)
        for seed in _seeds(cfg):
            profiles = time_profiles(seed, cfg.forcing_terms, times / cfg.T)
            fields = _forcing_fields(cfg, grid, seed, cfg.forcing_terms)
            trials.append(_record(seed, N, cfg.M, *thm5_sides(t, grid, fields, profiles, times, cfg.rule)))
    return _finalize(cfg, trials)


def run_thm7(cfg: ExperimentConfig) -> RatioReport:
    _expect(cfg, "thm7")
    t = _require_tuple(cfg)
    trials = []
    for N in cfg.levels:
        grid = _grid(cfg, N)
        times = _times(cfg.T, cfg.M)
        for seed in _seeds(cfg):
            profiles = time_profiles(seed, cfg.forcing_terms, times / cfg.T)
            fields = _forcing_fields(cfg, grid, seed, cfg.forcing_terms)
            u0, _ = _vector_data(cfg, grid, seed)
            trials.append(_record(seed, N, cfg.M, *thm7_sides(t, u0, fields, profiles, times, cfg.rule)))
    return _finalize(cfg, trials)


def run_lemma1(cfg: ExperimentConfig) -> RatioReport:
    """``||G||_{L^2} / ||F||_{L^1}`` for the stream function ``G`` of planar ``F``."""
    _expect(cfg, "lemma1")
    trials = []
    for N in cfg.levels:
        grid = _grid(cfg, N)
        for seed in _seeds(cfg):
            F = DivFreeGenerator(cfg.generator, seed, cfg.beta, cfg.cutoff).generate(grid)
            rhs = l1_norm(F)
            lhs = lemma1_ratio(F) * rhs if rhs > 0 else lebesgue_norm(stream_function(F), 2)
            trials.append(_record(seed, N, 0, lhs, rhs))
    return _finalize(cfg, trials)


def run_vanschaftingen(cfg: ExperimentConfig) -> RatioReport:
    """Negative-order Sobolev norm of divergence-free ``F`` against ``||F||_{L^1}`` over an alpha grid."""
    _expect(cfg, "vanschaftingen")
    trials = []
    for N in cfg.levels:
        grid = _grid(cfg, N)
        for seed in _seeds(cfg):
            F = DivFreeGenerator(cfg.generator, seed, cfg.beta, cfg.cutoff).generate(grid)
            rhs = l1_norm(F)
            for alpha in cfg.alphas:
                ratio = vs_ratio(F, alpha)
                trials.append(TrialRecord(seed, N, 0, ratio * rhs, rhs, ratio, f"alpha={alpha}"))
    return _finalize(cfg, trials)


def run_wente(cfg: ExperimentConfig) -> RatioReport:
    _expect(cfg, "wente")
    trials = []
    for N in cfg.levels:
        grid = _grid(cfg, N)
        for seed in _seeds(cfg):
            F = random_field(grid, seed, 2, cfg.cutoff, cfg.beta)
            trials.append(_record(seed, N, 0, *wente_sides(F)))
    return _finalize(cfg, trials)


def run_wente_wave(cfg: ExperimentConfig) -> RatioReport:
    _expect(cfg, "wente_wave")
    trials = []
    times = _times(cfg.T, cfg.M)
    for N in cfg.levels:
        grid = _grid(cfg, N)
        for seed in _seeds(cfg):
            profiles = time_profiles(seed, 2, times / cfg.T)
            if cfg.forcing == "zero":
                A = B = _zero_vector(grid)
            else:
                A = random_field(grid, (seed, 0), 2, cfg.cutoff, cfg.beta)
                B = random_field(grid, (seed, 1), 2, cfg.cutoff, cfg.beta)
            data = WaveData(*_scalar_data(cfg, grid, seed))
            trials.append(_record(seed, N, cfg.M, *wente_wave_sides(data, A, B, profiles, times, cfg.rule)))
    return _finalize(cfg, trials)


def run_scaling_sweep(cfg: ExperimentConfig, lambdas: Optional[Sequence[int]] = None) -> RatioReport:
    """Ratios under ``x -> lam x``, ``t -> lam t`` on the finest grid level.

    The dilated problem lives on the torus of period ``L/lam`` over ``[0, T/lam]``
    with ``u1 -> lam u1`` and ``f -> lam^2 f``, so its solution is
    ``u(lam t, lam x)``.  The spread is ``max/min - 1`` of each trial's ratios.
    """
    _expect(cfg, "scaling_sweep")
    lambdas = tuple(cfg.scales if lambdas is None else lambdas)
    for lam in lambdas:
        if isinstance(lam, bool) or int(lam) != lam or lam < 1:
            raise ConfigError(f"scale factors must be positive integers, got {lam!r}")
    t = _require_tuple(cfg)
    N = cfg.levels[-1]
    trials = []
    for seed in _seeds(cfg):
        for lam in lambdas:
            trials.append(_record(seed, N, cfg.M, *_wave_trial(cfg, cfg.base, t, N, seed, int(lam)),
                                  label=f"lambda={int(lam)}"))
    rep = _finalize(cfg, trials, refinement=False)
    spreads = []
    for seed in _seeds(cfg):
        r = [x.ratio for x in trials if x.seed == seed and x.ratio is not None]
        if r:
            spreads.append(max(r) / min(r) - 1.0)
    for lam in lambdas:
        r = [x.ratio for x in trials if x.label == f"lambda={int(lam)}" and x.ratio is not None]
        rep.scaling[int(lam)] = max(r) if r else None
    rep.checks["scale_spread"] = bool(spreads) and max(spreads) <= cfg.max_spread
    return rep


def gaussian_bump(grid: Grid, width: float) -> ScalarField:
    """Centred Gaussian ``exp(-|x - c|^2 / (2 width^2))``."""
    c = grid.period / 2
    return ScalarField.from_function(
        grid, lambda *x: np.exp(-sum((xj - c) ** 2 for xj in x) / (2 * width ** 2)))


def riesz_l1_ratio(grid: Grid, width: float) -> tuple:
    g = gaussian_bump(grid, width)
    return lebesgue_norm(riesz_transform(g, 1), 1), lebesgue_norm(g, 1)


def run_riesz_demo(cfg: ExperimentConfig) -> RatioReport:
    """``||R_1 g||_{L^1} / ||g||_{L^1}`` for narrowing Gaussians ``g``.

    The ratio keeps increasing as the width shrinks, which is how the failure
    of ``L^1`` boundedness shows up on a fixed grid.  Widths are processed
    from widest to narrowest.
    """
    _expect(cfg, "riesz_demo")
    widths = sorted(cfg.widths, reverse=True)
    trials = []
    for N in cfg.levels:
        grid = _grid(cfg, N)
        for w in widths:
            trials.append(_record(0, N, 0, *riesz_l1_ratio(grid, w), label=f"width={w}"))
    rep = _finalize(cfg, trials, refinement=False)
    monotone = True
    for N in cfg.levels:
        r = [x.ratio for x in trials if x.N == N]
        monotone &= len(r) >= 3 and all(b > a for a, b in zip(r, r[1:]))
    rep.checks["monotone_increase"] = monotone
    if len(cfg.levels) > 1:
        coarse = [x.ratio for x in trials if x.N == cfg.levels[-2]]
        fine = [x.ratio for x in trials if x.N == cfg.levels[-1]]
        drift = max(abs(b / a - 1.0) for a, b in zip(coarse, fine))
        rep.growth = drift
        rep.checks["refinement_consistent"] = drift <= cfg.max_growth
    return rep


RUNNERS = {
    "prop1": run_prop1,
    "thm2": run_thm2,
    "thm5": run_thm5,
    "thm7": run_thm7,
    "lemma1": run_lemma1,
    "vanschaftingen": run_vanschaftingen,
    "wente": run_wente,
    "wente_wave": run_wente_wave,
    "scaling_sweep": run_scaling_sweep,
    "riesz_demo": run_riesz_demo,
}


def run(cfg: ExperimentConfig) -> RatioReport:
    """Dispatch on ``cfg.experiment``."""
    return RUNNERS[cfg.experiment](cfg)


# configurations used by the acceptance suite and shipped under configs/
PRESETS = {
    "prop1": dict(experiment="prop1", dim=2, cutoff=16),
    "thm2": dict(experiment="thm2", dim=2, cutoff=16,
                 exponents={"q": "8", "r": "8", "qt": "inf", "s": "5/8", "k": "5/8"}),
    "thm5": dict(experiment="thm5", dim=3, cutoff=6, forcing_terms=1, data="zero",
                 exponents={"q": "inf", "r": "2", "qt": "inf", "k": "1/2"}),
    "thm7": dict(experiment="thm7", dim=2, cutoff=16,
                 exponents={"q": "4", "r": "4", "qt": "4", "s": "0", "k": "1/2"}),
    "lemma1": dict(experiment="lemma1", dim=2, cutoff=16, trials=100),
    "vanschaftingen_2d": dict(experiment="vanschaftingen", dim=2, cutoff=16, trials=100),
    "vanschaftingen_3d": dict(experiment="vanschaftingen", dim=3, cutoff=8, trials=20),
    "wente": dict(experiment="wente", dim=2, cutoff=10),
    "wente_wave": dict(experiment="wente_wave", dim=2, cutoff=10),
    "scaling_prop1": dict(experiment="scaling_sweep", base="prop1", dim=2, levels=(128,),
                          cutoff=16, trials=10),
    "scaling_thm2": dict(experiment="scaling_sweep", base="thm2", dim=2, levels=(128,),
                         cutoff=16, trials=10,
                         exponents={"q": "8", "r": "8", "qt": "inf", "s": "5/8", "k": "5/8"}),
    "riesz_demo": dict(experiment="riesz_demo", dim=2, levels=(128, 256), widths=(0.4, 0.2, 0.1)),
}


def preset(name: str, **changes) -> ExperimentConfig:
    return ExperimentConfig(**{**PRESETS[name], **changes})
