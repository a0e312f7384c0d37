"""Spectral propagators for the wave and Schrodinger equations with Duhamel forcing.

Each Fourier mode evolves independently, so free evolution is exact.  The
Duhamel integrals are cumulative integrals of ``exp(i lam s) f_hat(s)``
over the forcing's time samples.  Two rules are available:

``"cubic"`` (default)
    the kernel ``exp(i lam s)`` is integrated exactly against a local cubic
    interpolant of ``f_hat``; fourth order, and insensitive to how fast the
    mode oscillates.
``"trapezoid"``
    composite trapezoid rule applied to the full integrand; second order,
    error growing like ``(lam dt)^2``.

Trajectories are stored by their Fourier coefficients on the union of the
supports of data and forcing (:class:`SpaceTimeField`), which keeps
band-limited three-dimensional runs small.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (DimensionMismatch, NotApplicable, TimeGridMismatch,
                     ZeroEnergy, ZeroModeViolation)
from .spectral_core import (MEAN_TOL, Grid, ScalarField, VectorField,
                            _lebesgue_from_abs, _sobolev_weight, sfft)

Field = Union[ScalarField, VectorField]

DUHAMEL_RULES = ("cubic", "trapezoid")
UNIFORM_RTOL = 1e-12


def _component_coeffs(u: Field) -> np.ndarray:
    c = u.coefficients
    return c[None] if isinstance(u, ScalarField) else c


SUPPORT_RTOL = 1e-14


def _support(*coeff_arrays) -> np.ndarray:
    """Flat indices where any of the given ``(C, *shape)`` arrays is non-negligible.

    Coefficients below ``SUPPORT_RTOL`` times the largest of their component are FFT roundoff
    and are dropped, so fields built from samples stay compactly stored.
    """
    mask = None
    for c in coeff_arrays:
        a = np.abs(c.reshape(c.shape[0], -1))
        top = a.max(axis=1, keepdims=True) if a.size else 0.0
        m = np.any(a > SUPPORT_RTOL * top, axis=0)
        mask = m if mask is None else mask | m
    return np.flatnonzero(mask)


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Uniformly time-sampled field stored by Fourier coefficients.

    ``coefficients[m, j, p]`` is the coefficient of component ``j`` at time
    ``times[m]`` for the grid mode with flat index ``modes[p]``; every other
    mode is zero.  ``scalar`` marks trajectories of scalar fields.
    """

    grid: Grid
    times: np.ndarray
    modes: np.ndarray
    coefficients: np.ndarray
    scalar: bool = False
    forced: bool = False

    def __post_init__(self):
        t = np.array(self.times, dtype=float).ravel()
        modes = np.array(self.modes, dtype=np.int64).ravel()
        c = np.array(self.coefficients, dtype=complex)
        if t.size == 0:
            raise TimeGridMismatch("a trajectory needs at least one time sample")
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise TimeGridMismatch("times must be strictly increasing")
            if np.max(np.abs(dt - dt.mean())) > UNIFORM_RTOL * max(abs(dt.mean()), abs(t[-1])):
                raise TimeGridMismatch("times must be uniformly spaced")
        ncomp = 1 if self.scalar else self.grid.dim
        if c.shape != (t.size, ncomp, modes.size):
            raise DimensionMismatch(
                f"coefficients shape {c.shape} != {(t.size, ncomp, modes.size)}")
        for name, val in (("times", t), ("modes", modes), ("coefficients", c)):
            val.flags.writeable = False
            object.__setattr__(self, name, val)

    # construction -------------------------------------------------------

    @classmethod
    def from_fields(cls, times, fields: Sequence[Field], forced: bool = False) -> "SpaceTimeField":
        fields = list(fields)
        if len(fields) != len(np.atleast_1d(times)):
            raise TimeGridMismatch("one field per time sample is required")
        grid = fields[0].grid
        scalar = isinstance(fields[0], ScalarField)
        coeffs = [_component_coeffs(f) for f in fields]
        modes = _support(*coeffs)
        stacked = np.stack([c.reshape(c.shape[0], -1)[:, modes] for c in coeffs])
        return cls(grid, times, modes, stacked, scalar=scalar, forced=forced)

    @classmethod
    def from_separable(cls, times, profiles, fields: Sequence[Field]) -> "SpaceTimeField":
        """``f(t, x) = sum_j profiles[j](t) * fields[j](x)``."""
        profiles = np.atleast_2d(np.asarray(profiles))
        fields = list(fields)
        if profiles.shape[0] != len(fields):
            raise DimensionMismatch("one time profile per spatial field is required")
        grid = fields[0].grid
        scalar = isinstance(fields[0], ScalarField)
        coeffs = [_component_coeffs(f) for f in fields]
        modes = _support(*coeffs)
        flat = np.stack([c.reshape(c.shape[0], -1)[:, modes] for c in coeffs])
        stacked = np.einsum("jm,jcp->mcp", profiles, flat)
        return cls(grid, times, modes, stacked, scalar=scalar)

    # access ---------------------------------------------------------------

    @property
    def n_frames(self) -> int:
        return self.times.size

    @property
    def n_components(self) -> int:
        return self.coefficients.shape[1]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.n_frames > 1 else 0.0

    def dense_coefficients(self, i: int) -> np.ndarray:
        out = np.zeros((self.n_components, self.grid.size), dtype=complex)
        out[:, self.modes] = self.coefficients[i]
        return out.reshape((self.n_components,) + self.grid.shape)

    def frame(self, i: int) -> Field:
        c = self.dense_coefficients(i)
        if self.scalar:
            return ScalarField.from_coefficients(self.grid, c[0])
        return VectorField.from_coefficients(self.grid, c)

    def frame_samples(self, i: int) -> np.ndarray:
        """Physical samples of frame ``i`` as ``(C, *shape)``."""
        axes = tuple(range(1, self.grid.dim + 1))
        return sfft.ifftn(self.dense_coefficients(i), axes=axes) * self.grid.size

    def __iter__(self):
        return (self.frame(i) for i in range(self.n_frames))

    def restrict(self, index) -> "SpaceTimeField":
        index = np.asarray(index)
        return SpaceTimeField(self.grid, self.times[index], self.modes,
                              self.coefficients[index], self.scalar, self.forced)

    def zero_mode_position(self) -> Optional[int]:
        hit = np.flatnonzero(self.modes == 0)
        return int(hit[0]) if hit.size else None


@dataclass(frozen=True, eq=False)
class WaveData:
    """Initial position ``u0`` and velocity ``u1`` on a shared grid."""

    u0: Field
    u1: Field

    def __post_init__(self):
        if type(self.u0) is not type(self.u1) or self.u0.grid != self.u1.grid:
            raise DimensionMismatch("u0 and u1 must be fields of the same kind on the same grid")

    @property
    def grid(self) -> Grid:
        return self.u0.grid


# ---------------------------------------------------------------------------
# Duhamel quadrature


def _moments(theta: np.ndarray, order: int) -> np.ndarray:
    """``int_0^1 exp(i theta x) x^p dx`` for ``p < order``; shape ``theta.shape + (order,)``."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty(theta.shape + (order,), dtype=complex)
    small = np.abs(theta) < 1.0
    ts = theta[small]
    for p in range(order):
        acc = np.zeros(ts.shape, dtype=complex)
        term = np.ones(ts.shape, dtype=complex)
        for j in range(30):
            acc += term / (j + p + 1)
            term = term * (1j * ts) / (j + 1)
        out[small, p] = acc
    tb = theta[~small]
    e = np.exp(1j * tb)
    prev = (e - 1) / (1j * tb)
    out[~small, 0] = prev
    for p in range(1, order):
        prev = (e - p * prev) / (1j * tb)
        out[~small, p] = prev
    return out


def _lagrange_matrix(nodes) -> np.ndarray:
    """Columns hold monomial coefficients of the Lagrange basis on ``nodes``."""
    V = np.vander(np.asarray(nodes, dtype=float), len(nodes), increasing=True)
    return np.linalg.inv(V)


def cumulative_oscillatory_integral(lam: np.ndarray, values: np.ndarray, dt: float,
                                    rule: str = "cubic") -> np.ndarray:
    """``J[m] = int_0^{m dt} exp(i lam s) g(s) ds`` from samples ``g(m dt)``.

    ``lam`` has shape ``(P,)`` and ``values`` shape ``(M+1, C, P)``.
    """
    if rule not in DUHAMEL_RULES:
        raise ValueError(f"unknown Duhamel rule {rule!r}; expected one of {DUHAMEL_RULES}")
    lam = np.asarray(lam, dtype=float)
    M = values.shape[0] - 1
    out = np.zeros(values.shape, dtype=complex)
    if M == 0:
        return out
    theta = lam * dt
    starts = dt * np.arange(M)
    phase = np.exp(1j * np.outer(starts, lam))[:, None, :]
    if rule == "trapezoid":
        pieces = 0.5 * dt * (values[:-1] + np.exp(1j * theta) * values[1:])
    else:
        d = min(3, M)
        mom = _moments(theta, d + 1)
        i = np.arange(M)
        first = np.clip(i - (d - 1) // 2, 0, M - d)
        pieces = np.empty((M,) + values.shape[1:], dtype=complex)
        for offset in np.unique(first - i):
            sel = np.flatnonzero(first - i == offset)
            weights = dt * (mom @ _lagrange_matrix(offset + np.arange(d + 1)))
            acc = 0
            for j in range(d + 1):
                acc = acc + weights[:, j] * values[sel + offset + j]
            pieces[sel] = acc
    out[1:] = np.cumsum(phase * pieces, axis=0)
    return out


def _output_indices(f: SpaceTimeField, times) -> np.ndarray:
    if f.times[0] != 0:
        raise TimeGridMismatch("forcing samples must start at t = 0")
    if times is None:
        return np.arange(f.n_frames)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if f.n_frames == 1:
        idx = np.zeros(times.size, dtype=int)
    else:
        idx = np.rint(times / f.dt).astype(int)
    scale = max(1.0, abs(float(f.times[-1])))
    if (np.any(idx < 0) or np.any(idx >= f.n_frames)
            or np.any(np.abs(f.times[np.clip(idx, 0, f.n_frames - 1)] - times) > 1e-12 * scale)):
        raise TimeGridMismatch("requested times must be samples of the forcing")
    return idx


def _check_forcing_mean(f: SpaceTimeField) -> None:
    pos = f.zero_mode_position()
    if pos is None:
        return
    zero = np.abs(f.coefficients[:, :, pos])
    scale = np.abs(f.coefficients).sum(axis=2)
    if np.any(zero > MEAN_TOL * scale):
        raise ZeroModeViolation("forcing must be mean-zero in every component at every time")


def _prepare(grid: Grid, scalar: bool, data_coeffs, f: Optional[SpaceTimeField], times):
    if f is not None:
        if f.grid != grid or f.scalar != scalar:
            raise DimensionMismatch("forcing does not match the data's grid or kind")
        idx = _output_indices(f, times)
        out_times = f.times[idx]
        modes = np.union1d(_support(*data_coeffs), f.modes)
    else:
        idx = None
        out_times = np.atleast_1d(np.asarray(0.0 if times is None else times, dtype=float))
        modes = _support(*data_coeffs)
    flat = [c.reshape(c.shape[0], -1)[:, modes] for c in data_coeffs]
    omega = grid.kmag.ravel()[modes]
    fvals = None
    if f is not None:
        fvals = np.zeros((f.n_frames, f.n_components, modes.size), dtype=complex)
        fvals[:, :, np.searchsorted(modes, f.modes)] = f.coefficients
    return idx, out_times, modes, flat, omega, fvals


def wave_solve(data: WaveData, f: Optional[SpaceTimeField] = None, times=None,
               rule: str = "cubic"):
    """Solve ``u_tt - Delta u = f`` mode by mode; returns ``(u, u_t)`` trajectories.

    Per nonzero mode::

        u(t) = cos(t|k|) u0 + sin(t|k|)/|k| u1 + int_0^t sin((t-s)|k|)/|k| f(s) ds

    with the limits ``cos -> 1`` and ``sin(t|k|)/|k| -> t`` at ``k = 0``.  With a
    forcing, ``times`` must be a subset of ``f.times`` (default: all of them).
    """
    grid = data.grid
    scalar = isinstance(data.u0, ScalarField)
    idx, t, modes, (c0, c1), omega, fvals = _prepare(
        grid, scalar, [_component_coeffs(data.u0), _component_coeffs(data.u1)], f, times)
    if f is not None:
        _check_forcing_mean(f)
    tt = t[:, None, None]
    w = omega[None, None, :]
    nz = w > 0
    safe = np.where(nz, w, 1.0)
    cos, sin = np.cos(tt * w), np.sin(tt * w)
    sinc = np.where(nz, sin / safe, tt)
    u = cos * c0 + sinc * c1
    ut = np.where(nz, -w * sin, 0.0) * c0 + cos * c1
    if f is not None:
        dt = f.dt
        jp = cumulative_oscillatory_integral(-omega, fvals, dt, rule)[idx]
        jm = cumulative_oscillatory_integral(omega, fvals, dt, rule)[idx]
        ep, em = np.exp(1j * tt * w), np.exp(-1j * tt * w)
        duh = (ep * jp - em * jm) / (2j * safe)
        duh_t = 0.5 * (ep * jp + em * jm)
        if np.any(omega == 0):
            s = f.times[:, None, None]
            j0 = jp[..., omega == 0]
            j1 = cumulative_oscillatory_integral(np.zeros(1), s * fvals[..., omega == 0], dt, rule)[idx]
            duh[..., omega == 0] = tt * j0 - j1
            duh_t[..., omega == 0] = j0
        u = u + duh
        ut = ut + duh_t
    forced = f is not None
    return (SpaceTimeField(grid, t, modes, u, scalar, forced),
            SpaceTimeField(grid, t, modes, ut, scalar, forced))


def schrodinger_solve(u0: Field, f: Optional[SpaceTimeField] = None, times=None,
                      rule: str = "cubic") -> SpaceTimeField:
    """Solve ``i u_t + Delta u = f`` mode by mode.

    ``u(t) = exp(-i t|k|^2) u0 - i int_0^t exp(-i (t-s)|k|^2) f(s) ds``.
    """
    grid = u0.grid
    scalar = isinstance(u0, ScalarField)
    idx, t, modes, (c0,), omega, fvals = _prepare(grid, scalar, [_component_coeffs(u0)], f, times)
    lam = omega ** 2
    prop = np.exp(-1j * t[:, None, None] * lam[None, None, :])
    u = prop * c0
    if f is not None:
        u = u - 1j * prop * cumulative_oscillatory_integral(lam, fvals, f.dt, rule)[idx]
    return SpaceTimeField(grid, t, modes, u, scalar, f is not None)


# ---------------------------------------------------------------------------
# norms along a trajectory


def frame_sobolev_norms(traj: SpaceTimeField, s: float) -> np.ndarray:
    """``||traj(t)||_{H^s}`` at every sample, computed on the stored modes."""
    s = float(s)
    w = _sobolev_weight(traj.grid, s).ravel()[traj.modes]
    if s < 0:
        pos = traj.zero_mode_position()
        if pos is not None:
            zero = np.abs(traj.coefficients[:, :, pos])
            scale = np.abs(traj.coefficients).sum(axis=2)
            if np.any(zero > MEAN_TOL * scale):
                raise ZeroModeViolation("negative-order norm of a trajectory with nonzero mean")
    energy = np.einsum("p,mcp->m", w, np.abs(traj.coefficients) ** 2)
    return np.sqrt(traj.grid.volume * energy)


def frame_lebesgue_norms(traj: SpaceTimeField, r: float) -> np.ndarray:
    """``||traj(t)||_{L^r_x}`` at every sample (Euclidean length for vectors)."""
    r = float(r)
    if r == 2:
        return frame_sobolev_norms(traj, 0.0)
    out = np.empty(traj.n_frames)
    for i in range(traj.n_frames):
        samples = traj.frame_samples(i)
        mag = np.sqrt(np.sum(np.abs(samples) ** 2, axis=0))
        out[i] = _lebesgue_from_abs(mag, r, traj.grid.cell_volume)
    return out


def time_norm(values, times, q: float) -> float:
    """``L^q_t`` norm of sampled values: max for ``q = inf``, trapezoid otherwise."""
    values = np.abs(np.asarray(values, dtype=float))
    q = float(q)
    if q == math.inf:
        return float(values.max())
    if q <= 0:
        raise ValueError("time exponent must be positive")
    times = np.asarray(times, dtype=float)
    if values.size == 1:
        return 0.0
    return float(np.trapezoid(values ** q, times) ** (1.0 / q))


def spacetime_norm(traj: SpaceTimeField, q: float, r: float) -> float:
    """Mixed norm ``||u||_{L^q_t L^r_x}`` over the sampled window."""
    return time_norm(frame_lebesgue_norms(traj, r), traj.times, q)


def energy_check(u: SpaceTimeField, ut: SpaceTimeField) -> float:
    """Maximal relative drift of ``||u||_{H^1}^2 + ||u_t||_{L^2}^2`` along a free solution."""
    if u.forced or ut.forced:
        raise NotApplicable("energy is only conserved for unforced solutions")
    energy = frame_sobolev_norms(u, 1.0) ** 2 + frame_sobolev_norms(ut, 0.0) ** 2
    if energy[0] == 0:
        raise ZeroEnergy("initial energy vanishes")
    return float(np.max(np.abs(energy / energy[0] - 1.0)))


# ---------------------------------------------------------------------------
# export


def export_trajectory(traj: SpaceTimeField, directory, name: str = "u", fmt: str = "bin") -> Path:
    """Write each frame with :func:`~divfree_strichartz.fields.save_field` plus ``manifest.json``."""
    from .fields import save_field

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    ext = "csv" if fmt == "csv" else "dfsf"
    files = []
    for i in range(traj.n_frames):
        fn = f"{name}_{i:05d}.{ext}"
        save_field(directory / fn, traj.frame(i), fmt=fmt)
        files.append(fn)
    manifest = {
        "format_version": 1,
        "name": name,
        "dim": traj.grid.dim,
        "N": traj.grid.n_points,
        "L": traj.grid.period,
        "scalar": traj.scalar,
        "times": [float(t) for t in traj.times],
        "frames": files,
    }
    path = directory / f"{name}_manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


def load_trajectory(manifest_path) -> SpaceTimeField:
    from .fields import load_field

    manifest_path = Path(manifest_path)
    meta = json.loads(manifest_path.read_text())
    fields = [load_field(manifest_path.parent / fn) for fn in meta["frames"]]
    return SpaceTimeField.from_fields(meta["times"], fields)
