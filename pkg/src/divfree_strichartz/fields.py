"""Divergence-free vector fields: construction, certification and the div-curl quotients.

Random test data is generated from Fourier coefficients indexed by the
integer lattice, never by physical wavenumber, so a given seed produces the
same trigonometric polynomial on every grid that can hold it.  Refinement
sweeps rely on this.
"""
from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import (BadAlpha, DimensionMismatch, DivisionByZero,
                     NotDivergenceFree)
from .spectral_core import (Grid, ScalarField, VectorField, check_mean_zero,
                            dealiased_product, lebesgue_norm, partial,
                            sobolev_lp_norm)

DIVFREE_TOL = 1e-10


def divergence(F: VectorField) -> ScalarField:
    """Spectral divergence ``sum_j d_j F_j``."""
    return ScalarField.from_coefficients(F.grid, F.divergence_coefficients())


def certify(F: VectorField, tol: float = DIVFREE_TOL) -> VectorField:
    """Return ``F`` marked divergence-free, or raise :class:`NotDivergenceFree`."""
    return VectorField(F.grid, F.data, divergence_free=True, divfree_tol=tol)


def _require_plane(grid: Grid) -> None:
    if grid.dim != 2:
        raise DimensionMismatch(f"operation defined for n = 2 only, got n = {grid.dim}")


def curl_of_stream(G: ScalarField) -> VectorField:
    """``(d_2 G, -d_1 G)`` for a scalar stream function in the plane."""
    _require_plane(G.grid)
    k1, k2 = G.grid.derivative_axes
    c = G.coefficients
    return VectorField.from_coefficients(G.grid, np.stack([1j * k2 * c, -1j * k1 * c]),
                                         divergence_free=True)


def stream_function(F: VectorField, tol: float = DIVFREE_TOL) -> ScalarField:
    """Mean-zero ``G`` with ``curl_of_stream(G) = F`` up to the mean of ``F``.

    Computed as ``G = (-Delta)^{-1} (d_1 F_2 - d_2 F_1)``.
    """
    _require_plane(F.grid)
    if F.divergence_residual() > tol:
        raise NotDivergenceFree("stream function requires a divergence-free field")
    k1, k2 = F.grid.derivative_axes
    c1, c2 = F.coefficients
    vort = 1j * k1 * c2 - 1j * k2 * c1
    k2sum = k1 ** 2 + k2 ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(k2sum > 0, vort / k2sum, 0.0)
    return ScalarField.from_coefficients(F.grid, g)


def l1_norm(F: VectorField) -> float:
    """``L^1`` norm of the pointwise Euclidean length ``|F|``."""
    return lebesgue_norm(F, 1)


def lemma1_ratio(F: VectorField) -> float:
    """``||G||_{L^2} / ||F||_{L^1}`` for the stream function ``G`` of ``F``."""
    G = stream_function(F)
    den = l1_norm(F)
    if den == 0:
        raise DivisionByZero("ratio undefined for the zero field")
    return lebesgue_norm(G, 2) / den


def leray_project(F: VectorField) -> VectorField:
    """Fourier-side projection ``F - k (k.F)/|k|^2`` onto divergence-free fields.

    Uses the Nyquist-free derivative wavenumbers so the output is exactly
    solenoidal for the spectral divergence; the zero mode is left unchanged.
    """
    k = F.grid.derivative_axes
    c = F.coefficients
    kk = sum(kj ** 2 for kj in k)
    kdotc = sum(kj * cj for kj, cj in zip(k, c))
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(kk > 0, kdotc / kk, 0.0)
    out = np.stack([cj - kj * scale for kj, cj in zip(k, c)])
    return VectorField.from_coefficients(F.grid, out, divergence_free=True)


def jacobian_det(F: VectorField) -> ScalarField:
    """``d_1 F_1 d_2 F_2 - d_2 F_1 d_1 F_2`` with dealiased products."""
    _require_plane(F.grid)
    F1, F2 = F.components
    a, b = dealiased_product(partial(F1, 1), partial(F2, 2)), dealiased_product(partial(F1, 2), partial(F2, 1))
    return a - b


def vs_ratio(F: VectorField, alpha: float, tol: float = DIVFREE_TOL) -> float:
    """``sum_j ||F_j||_{W^{-alpha, n/(n-alpha)}} / ||F||_{L^1}`` for divergence-free ``F``."""
    n = F.grid.dim
    alpha = float(alpha)
    if not 0 < alpha < n:
        raise BadAlpha(f"alpha must lie in (0, {n}), got {alpha}")
    if F.divergence_residual() > tol:
        raise NotDivergenceFree("the ratio is only defined for divergence-free fields")
    check_mean_zero(F)
    den = l1_norm(F)
    if den == 0:
        raise DivisionByZero("ratio undefined for the zero field")
    p = n / (n - alpha)
    return sum(sobolev_lp_norm(c, -alpha, p) for c in F.components) / den


# --------------------------------------------------------------------------
# seeded band-limited data


def _lattice_box(dim: int, cutoff: int):
    m = np.arange(-cutoff, cutoff + 1)
    mesh = np.meshgrid(*([m] * dim), indexing="ij")
    return m, mesh


def _hermitian(c: np.ndarray, dim: int) -> np.ndarray:
    flipped = c[(Ellipsis,) + (slice(None, None, -1),) * dim]
    return 0.5 * (c + np.conj(flipped))


def _embed(grid: Grid, box: np.ndarray, cutoff: int) -> np.ndarray:
    """Place box coefficients indexed by ``m in [-K, K]^n`` into grid FFT order."""
    if 2 * cutoff >= grid.n_points:
        raise ValueError(f"cutoff {cutoff} does not fit on a grid with N = {grid.n_points}")
    n = grid.dim
    idx = np.arange(-cutoff, cutoff + 1) % grid.n_points
    lead = box.shape[:-n]
    out = np.zeros(lead + grid.shape, dtype=complex)
    out[(Ellipsis,) + np.ix_(*[idx] * n)] = box
    return out


def random_coefficients(dim: int, seed, n_components: int, cutoff: int,
                        beta: float = 2.0, real: bool = True) -> np.ndarray:
    """Box coefficients ``c_j(m)``, ``0 < |m| <= cutoff``, with amplitude ``|m|^-beta``.

    Returned shape is ``(n_components, 2K+1, ..., 2K+1)``.  The draw depends only
    on ``(seed, dim, n_components, cutoff)``.
    """
    rng = np.random.default_rng(seed)
    m, mesh = _lattice_box(dim, cutoff)
    radius = np.sqrt(sum(x.astype(float) ** 2 for x in mesh))
    shape = (n_components,) + radius.shape
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    with np.errstate(divide="ignore"):
        amp = np.where((radius > 0) & (radius <= cutoff), radius ** (-beta), 0.0)
    c = c * amp
    return _hermitian(c, dim) if real else c


def random_field(grid: Grid, seed, n_components: Optional[int] = None, cutoff: Optional[int] = None,
                 beta: float = 2.0, real: bool = True) -> Union[ScalarField, VectorField]:
    """Mean-zero band-limited random field; scalar when ``n_components`` is None."""
    K = grid.n_points // 3 if cutoff is None else int(cutoff)
    ncomp = 1 if n_components is None else n_components
    c = _embed(grid, random_coefficients(grid.dim, seed, ncomp, K, beta, real), K)
    if n_components is None:
        return ScalarField.from_coefficients(grid, c[0])
    if ncomp != grid.dim:
        raise DimensionMismatch("vector fields carry one component per dimension")
    return VectorField.from_coefficients(grid, c)


GENERATOR_KINDS = ("projected_random", "curl_of_stream", "single_mode")


@dataclass(frozen=True)
class DivFreeGenerator:
    """Deterministic source of divergence-free test fields.

    ``cutoff`` is a lattice radius; ``None`` means ``N // 3`` of the target grid.
    Fixing ``cutoff`` explicitly makes the family independent of ``N``.
    """

    kind: str = "projected_random"
    seed: int = 0
    beta: float = 2.0
    cutoff: Optional[int] = None

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.beta < 0:
            raise ValueError("decay exponent must be nonnegative")

    def _cutoff(self, grid: Grid) -> int:
        K = grid.n_points // 3 if self.cutoff is None else int(self.cutoff)
        if K < 1 or 3 * K > grid.n_points:
            raise ValueError(f"cutoff {K} must satisfy 1 <= K <= N/3 (N = {grid.n_points})")
        return K

    def generate(self, grid: Grid) -> VectorField:
        K = self._cutoff(grid)
        if self.kind == "curl_of_stream":
            _require_plane(grid)
            G = random_field(grid, self.seed, None, K, self.beta + 1.0)
            return curl_of_stream(G)
        if self.kind == "single_mode":
            return self._single_mode(grid, K)
        raw = random_field(grid, self.seed, grid.dim, K, self.beta)
        return leray_project(raw)

    def _single_mode(self, grid: Grid, K: int) -> VectorField:
        rng = np.random.default_rng(self.seed)
        while True:
            m = rng.integers(-K, K + 1, size=grid.dim)
            if 0 < np.linalg.norm(m) <= K:
                break
        a = rng.standard_normal(grid.dim)
        a -= m * (a @ m) / (m @ m)
        if not np.any(a):
            a = np.roll(m, 1) * np.array([1] + [-1] * (grid.dim - 1))
            a = a - m * (a @ m) / (m @ m)
        phase = rng.uniform(0, 2 * math.pi)
        x = grid.coordinates()
        arg = sum(int(mj) * grid.fundamental * xj for mj, xj in zip(m, x)) + phase
        data = np.stack([aj * np.cos(arg) * np.ones(grid.shape) for aj in a])
        return certify(VectorField(grid, data))


# --------------------------------------------------------------------------
# serialization

MAGIC = b"DFSF"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIIdI")


def save_field(path, field: Union[ScalarField, VectorField], fmt: Optional[str] = None) -> Path:
    """Write a field as binary (``.dfsf``) or CSV; see ``docs/formats.md``."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix == ".csv" else "bin")
    g = field.grid
    data = field.data if isinstance(field, VectorField) else field.samples[None]
    ncomp = data.shape[0] if isinstance(field, VectorField) else 0
    if fmt == "bin":
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, g.dim, g.n_points, g.period, ncomp))
            fh.write(np.ascontiguousarray(data, dtype="<c16").tobytes())
    elif fmt == "csv":
        flat = data.reshape(data.shape[0], -1)
        header = f"# dfsf-csv version={FORMAT_VERSION} dim={g.dim} N={g.n_points} L={g.period!r} ncomp={ncomp}"
        cols = []
        for j in range(flat.shape[0]):
            cols += [flat[j].real, flat[j].imag]
        names = ",".join(f"re{j},im{j}" for j in range(flat.shape[0]))
        table = np.column_stack([np.arange(flat.shape[1])] + cols)
        np.savetxt(path, table, delimiter=",", header=header + "\nindex," + names,
                   comments="", fmt=["%d"] + ["%.17g"] * len(cols))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def _build(grid, ncomp, data):
    if ncomp == 0:
        return ScalarField(grid, data[0])
    return VectorField(grid, data)


def load_field(path) -> Union[ScalarField, VectorField]:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        raw = path.read_bytes()
        magic, version, dim, N, L, ncomp = _HEADER.unpack_from(raw)
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {version}")
        grid = Grid(dim, N, L)
        data = np.frombuffer(raw, dtype="<c16", offset=_HEADER.size)
        return _build(grid, ncomp, data.reshape((max(ncomp, 1),) + grid.shape))
    with open(path) as fh:
        meta = dict(tok.split("=") for tok in fh.readline().split()[2:])
    grid = Grid(int(meta["dim"]), int(meta["N"]), float(meta["L"]))
    ncomp = int(meta["ncomp"])
    table = np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)
    vals = table[:, 1::2] + 1j * table[:, 2::2]
    return _build(grid, ncomp, vals.T.reshape((max(ncomp, 1),) + grid.shape))


def save_manifest(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True))
