"""Periodic grids, Fourier multipliers and spatial norms.

Everything lives on the torus ``[0, L)^n`` sampled at ``N`` points per axis.
Fourier coefficients are normalised as Fourier-series coefficients::

    c_k = N^{-n} sum_x u(x) exp(-i k.x)

so that Parseval reads ``||u||_2^2 = L^n sum_k |c_k|^2`` and agrees with the
cell-measure quadrature ``h^n sum_x |u(x)|^2`` used by :func:`lebesgue_norm`.

Wavevectors are the physical ones, ``k = (2 pi / L) m`` with ``m`` an integer
lattice index in ``[-N/2, N/2)``.  Odd symbols (derivatives, Riesz
transforms) are zeroed on Nyquist planes so that real fields stay real.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence, Union

import numpy as np
import scipy.fft as sfft

from .errors import (AxisOutOfRange, BadExponent, DimensionMismatch,
                     NonFiniteSymbol, NotDivergenceFree, ZeroModeViolation)

#: relative tolerance on the mean used by negative-order operators
MEAN_TOL = 1e-10

ZERO_MODE_POLICIES = ("zero", "identity", "error")


def _readonly(a):
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice on ``[0, period)^dim`` with ``n_points`` per axis."""

    dim: int
    n_points: int
    period: float = 2 * math.pi

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dim}")
        N = self.n_points
        if int(N) != N or N < 4 or (int(N) & (int(N) - 1)):
            raise ValueError(f"points per axis must be a power of two >= 4, got {N}")
        if not (math.isfinite(self.period) and self.period > 0):
            raise ValueError(f"period must be positive and finite, got {self.period}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "n_points", int(N))
        object.__setattr__(self, "period", float(self.period))

    @property
    def h(self) -> float:
        return self.period / self.n_points

    @property
    def shape(self) -> tuple:
        return (self.n_points,) * self.dim

    @property
    def size(self) -> int:
        return self.n_points ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def volume(self) -> float:
        return self.period ** self.dim

    @property
    def fundamental(self) -> float:
        """Smallest nonzero wavenumber ``2 pi / L``."""
        return 2 * math.pi / self.period

    def _axis(self, values, j):
        shape = [1] * self.dim
        shape[j] = self.n_points
        return _readonly(np.asarray(values).reshape(shape))

    @cached_property
    def index_axes(self) -> tuple:
        """Integer lattice indices per axis, broadcastable against the grid."""
        m = np.fft.fftfreq(self.n_points, 1.0 / self.n_points).round().astype(np.int64)
        return tuple(self._axis(m, j) for j in range(self.dim))

    @cached_property
    def wavenumber_axes(self) -> tuple:
        return tuple(self.fundamental * m.astype(float) for m in self.index_axes)

    @cached_property
    def derivative_axes(self) -> tuple:
        """Wavenumbers with the Nyquist entry set to zero (for odd symbols)."""
        out = []
        for k, m in zip(self.wavenumber_axes, self.index_axes):
            k = k.copy()
            k[m == -self.n_points // 2] = 0.0
            out.append(_readonly(k))
        return tuple(out)

    @cached_property
    def kmag(self) -> np.ndarray:
        return _readonly(np.sqrt(sum(k ** 2 for k in self.wavenumber_axes)))

    @cached_property
    def index_norm(self) -> np.ndarray:
        """Euclidean norm of the integer lattice index ``|m|``."""
        return _readonly(np.sqrt(sum(m.astype(float) ** 2 for m in self.index_axes)))

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for m in self.index_axes:
            mask |= np.broadcast_to(m == -self.n_points // 2, self.shape)
        return _readonly(mask)

    def coordinates(self) -> tuple:
        """Sample coordinates ``x_j = h * i_j`` as broadcastable arrays."""
        x = self.h * np.arange(self.n_points)
        return tuple(self._axis(x, j) for j in range(self.dim))

    def rescaled(self, factor: float) -> "Grid":
        """Same lattice with the period divided by ``factor``."""
        return Grid(self.dim, self.n_points, self.period / factor)


def _fft(samples, axes):
    return sfft.fftn(samples, axes=axes)


def _ifft(coeffs, axes):
    return sfft.ifftn(coeffs, axes=axes)


class _Lazy:
    """Immutable field holding samples, coefficients, or both.

    Whichever representation is missing is computed on first access, so
    fields built from Fourier coefficients never pay for an inverse FFT
    unless their samples are actually read.
    """

    __slots__ = ("grid", "_samples", "_coefficients", "_frozen")

    def __setattr__(self, name, value):
        if getattr(self, "_frozen", False):
            raise AttributeError(f"{type(self).__name__} is immutable")
        object.__setattr__(self, name, value)

    def _init(self, grid, samples, coefficients):
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "_samples", samples)
        object.__setattr__(self, "_coefficients", coefficients)

    def _freeze(self):
        object.__setattr__(self, "_frozen", True)

    @property
    def _axes(self):
        return None if isinstance(self, ScalarField) else tuple(range(1, self.grid.dim + 1))

    def _get_samples(self) -> np.ndarray:
        if self._samples is None:
            object.__setattr__(self, "_samples",
                               _readonly(_ifft(self._coefficients, self._axes) * self.grid.size))
        return self._samples

    @property
    def coefficients(self) -> np.ndarray:
        if self._coefficients is None:
            object.__setattr__(self, "_coefficients",
                               _readonly(_fft(self._samples, self._axes) / self.grid.size))
        return self._coefficients

    @property
    def has_coefficients(self) -> bool:
        return self._coefficients is not None

    def rms(self) -> np.ndarray:
        """Root-mean-square of each component, from whichever representation is at hand."""
        c = self._coefficients
        if c is not None:
            c = c[None] if isinstance(self, ScalarField) else c
            return np.sqrt(np.sum(np.abs(c.reshape(c.shape[0], -1)) ** 2, axis=1))
        a = self._samples[None] if isinstance(self, ScalarField) else self._samples
        return np.sqrt(np.mean(np.abs(a.reshape(a.shape[0], -1)) ** 2, axis=1))

    def __repr__(self):
        return f"{type(self).__name__}(grid={self.grid!r})"


class ScalarField(_Lazy):
    """Complex samples of a function on a :class:`Grid`."""

    __slots__ = ()

    def __init__(self, grid: Grid, samples):
        arr = np.array(samples, dtype=complex)
        if arr.shape != grid.shape:
            if arr.size != grid.size:
                raise DimensionMismatch(
                    f"expected {grid.size} samples, got {arr.size}")
            arr = arr.reshape(grid.shape)
        self._init(grid, _readonly(arr), None)
        self._freeze()

    @classmethod
    def from_function(cls, grid: Grid, func: Callable) -> "ScalarField":
        values = np.broadcast_to(np.asarray(func(*grid.coordinates()), dtype=complex), grid.shape)
        return cls(grid, values)

    @classmethod
    def from_coefficients(cls, grid: Grid, coeffs) -> "ScalarField":
        coeffs = np.array(coeffs, dtype=complex)
        if coeffs.size != grid.size:
            raise DimensionMismatch(f"expected {grid.size} coefficients, got {coeffs.size}")
        obj = cls.__new__(cls)
        obj._init(grid, None, _readonly(coeffs.reshape(grid.shape)))
        obj._freeze()
        return obj

    @classmethod
    def zeros(cls, grid: Grid) -> "ScalarField":
        return cls.from_coefficients(grid, np.zeros(grid.shape, dtype=complex))

    @property
    def samples(self) -> np.ndarray:
        return self._get_samples()

    @property
    def mean(self) -> complex:
        return complex(self.coefficients[(0,) * self.grid.dim])

    def max_abs(self) -> float:
        return float(np.abs(self.samples).max())

    def abs(self) -> np.ndarray:
        return np.abs(self.samples)

    def _check_peer(self, other):
        if not isinstance(other, ScalarField) or other.grid != self.grid:
            raise DimensionMismatch("fields live on different grids")

    def _combine(self, op, *others):
        fields = (self,) + others
        if all(f.has_coefficients for f in fields):
            return ScalarField.from_coefficients(self.grid, op(*(f.coefficients for f in fields)))
        return ScalarField(self.grid, op(*(f.samples for f in fields)))

    def __add__(self, other):
        self._check_peer(other)
        return self._combine(lambda a, b: a + b, other)

    def __sub__(self, other):
        self._check_peer(other)
        return self._combine(lambda a, b: a - b, other)

    def __mul__(self, scalar):
        return self._combine(lambda a: a * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._combine(lambda a: -a)


class VectorField(_Lazy):
    """``dim``-component field on a grid, stored as an array ``(dim, N, ..., N)``.

    Setting ``divergence_free=True`` requests the spectral certificate: the
    constructor raises :class:`NotDivergenceFree` unless
    ``max|div F| <= divfree_tol * max_j max|F_j|``.
    """

    __slots__ = ("divergence_free", "divfree_tol")

    def __init__(self, grid: Grid, data, divergence_free: bool = False, divfree_tol: float = 1e-10):
        arr = np.array(data, dtype=complex)
        want = (grid.dim,) + grid.shape
        if arr.shape != want:
            if arr.size != np.prod(want):
                raise DimensionMismatch(f"expected array of shape {want}, got {arr.shape}")
            arr = arr.reshape(want)
        self._init(grid, _readonly(arr), None)
        self._setup(divergence_free, divfree_tol)

    def _setup(self, divergence_free, divfree_tol):
        if divfree_tol < 0:
            raise ValueError("divfree_tol must be nonnegative")
        object.__setattr__(self, "divergence_free", bool(divergence_free))
        object.__setattr__(self, "divfree_tol", float(divfree_tol))
        self._freeze()
        if divergence_free:
            # the FFT-free bound settles most certificates for coefficient-built fields
            if self._samples is None and self.divergence_bound() <= divfree_tol:
                return
            residual = self.divergence_residual()
            if residual > divfree_tol:
                raise NotDivergenceFree(
                    f"relative divergence {residual:.3e} exceeds {divfree_tol:.1e}")

    @classmethod
    def from_components(cls, components: Sequence[ScalarField], **kwargs) -> "VectorField":
        grid = components[0].grid
        if any(c.grid != grid for c in components):
            raise DimensionMismatch("components live on different grids")
        return cls(grid, np.stack([c.samples for c in components]), **kwargs)

    @classmethod
    def from_coefficients(cls, grid: Grid, coeffs, divergence_free: bool = False,
                          divfree_tol: float = 1e-10) -> "VectorField":
        coeffs = np.array(coeffs, dtype=complex)
        want = (grid.dim,) + grid.shape
        if coeffs.size != np.prod(want):
            raise DimensionMismatch(f"expected coefficients of shape {want}, got {coeffs.shape}")
        obj = cls.__new__(cls)
        obj._init(grid, None, _readonly(coeffs.reshape(want)))
        obj._setup(divergence_free, divfree_tol)
        return obj

    @property
    def data(self) -> np.ndarray:
        return self._get_samples()

    @property
    def n_components(self) -> int:
        return self.grid.dim

    @property
    def components(self) -> tuple:
        if self.has_coefficients:
            return tuple(ScalarField.from_coefficients(self.grid, c) for c in self.coefficients)
        return tuple(ScalarField(self.grid, d) for d in self.data)

    def magnitude(self) -> np.ndarray:
        """Pointwise Euclidean length ``|F(x)|``."""
        return np.sqrt(np.sum(np.abs(self.data) ** 2, axis=0))

    def max_abs(self) -> float:
        return float(np.abs(self.data).max())

    def divergence_coefficients(self) -> np.ndarray:
        return sum(1j * k * c for k, c in zip(self.grid.derivative_axes, self.coefficients))

    def divergence_residual(self) -> float:
        """``max|div F| / max_j max|F_j|`` (0 for the zero field)."""
        scale = self.max_abs()
        if scale == 0:
            return 0.0
        div = _ifft(self.divergence_coefficients(), None) * self.grid.size
        return float(np.abs(div).max() / scale)

    def divergence_bound(self) -> float:
        """Upper bound on :meth:`divergence_residual` from coefficients alone.

        ``sum|div_hat|`` bounds ``max|div F|`` and the largest component RMS
        bounds ``max_j max|F_j|`` from below.
        """
        lower = float(self.rms().max())
        if lower == 0:
            return 0.0
        return float(np.abs(self.divergence_coefficients()).sum()) / lower

    def _combine(self, op, *others):
        fields = (self,) + others
        if all(f.has_coefficients for f in fields):
            return VectorField.from_coefficients(self.grid, op(*(f.coefficients for f in fields)))
        return VectorField(self.grid, op(*(f.data for f in fields)))

    def __add__(self, other):
        if not isinstance(other, VectorField) or other.grid != self.grid:
            raise DimensionMismatch("fields live on different grids")
        return self._combine(lambda a, b: a + b, other)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        return self._combine(lambda a: a * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._combine(lambda a: -a)


Field = Union[ScalarField, VectorField]


def _rebuild(like: Field, coeffs) -> Field:
    if isinstance(like, VectorField):
        return VectorField.from_coefficients(like.grid, coeffs)
    return ScalarField.from_coefficients(like.grid, coeffs)


def _component_coefficients(u: Field) -> np.ndarray:
    """Coefficients with a leading component axis (length 1 for scalars)."""
    c = u.coefficients
    return c[None] if isinstance(u, ScalarField) else c


def check_mean_zero(u: Field, tol: float = MEAN_TOL) -> None:
    """Raise :class:`ZeroModeViolation` unless every component has ``|mean| <= tol * max|u|``."""
    c = _component_coefficients(u)
    zero = (slice(None),) + (0,) * u.grid.dim
    means = np.abs(c[zero])
    # the RMS never exceeds the max, so passing against it settles the check without samples
    if np.all(means <= tol * u.rms()):
        return
    scale = np.abs(u.data if isinstance(u, VectorField) else u.samples[None]).reshape(len(means), -1).max(axis=1)
    bad = means > tol * scale
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ZeroModeViolation(
            f"mean {means[j]:.3e} exceeds {tol:.0e} x max {scale[j]:.3e} (component {j})")


def wavevector_norm(k: Sequence[np.ndarray]) -> np.ndarray:
    return np.sqrt(sum(kj ** 2 for kj in k))


@dataclass(frozen=True)
class MultiplierSpec:
    """A Fourier multiplier: ``symbol(k)`` receives the wavevector as a tuple of
    broadcastable per-axis arrays and returns the symbol values.

    ``odd`` marks symbols that are odd in ``k``; their Nyquist planes are zeroed.
    """

    symbol: Callable
    zero_mode_policy: str = "zero"
    odd: bool = False
    name: str = ""

    def __post_init__(self):
        if self.zero_mode_policy not in ZERO_MODE_POLICIES:
            raise ValueError(f"zero_mode_policy must be one of {ZERO_MODE_POLICIES}")

    def evaluate(self, grid: Grid) -> np.ndarray:
        with np.errstate(all="ignore"):
            sym = np.asarray(self.symbol(grid.wavenumber_axes), dtype=complex)
        sym = np.array(np.broadcast_to(sym, grid.shape))
        zero = (0,) * grid.dim
        rest = np.ones(grid.shape, dtype=bool)
        rest[zero] = False
        if not np.all(np.isfinite(sym[rest])):
            raise NonFiniteSymbol(f"symbol {self.name or self.symbol!r} is not finite on the grid")
        sym[zero] = 1.0 if self.zero_mode_policy == "identity" else 0.0
        if self.odd:
            sym[grid.nyquist_mask] = 0.0
        return sym


def apply_multiplier(u: Field, m: MultiplierSpec) -> Field:
    """Return the field with coefficients ``symbol(k) * u_hat(k)``."""
    if not np.all(np.isfinite(u.coefficients)):
        raise ValueError("input field has non-finite samples")
    if m.zero_mode_policy == "error":
        check_mean_zero(u)
    sym = m.evaluate(u.grid)
    return _rebuild(u, u.coefficients * sym)


def fractional_laplacian(u: Field, gamma: float) -> Field:
    """``(-Delta)^{gamma/2} u``, the multiplier ``|k|^gamma``.

    Positive powers annihilate the mean; negative powers require a mean-zero
    input and raise :class:`ZeroModeViolation` otherwise.
    """
    gamma = float(gamma)
    if gamma == 0:
        return _rebuild(u, u.coefficients.copy())
    policy = "zero" if gamma > 0 else "error"
    spec = MultiplierSpec(lambda k: wavevector_norm(k) ** gamma, policy,
                          name=f"|k|^{gamma}")
    return apply_multiplier(u, spec)


def _check_axis(u: Field, j: int) -> int:
    if int(j) != j or not 1 <= j <= u.grid.dim:
        raise AxisOutOfRange(f"axis {j} not in 1..{u.grid.dim}")
    return int(j) - 1


def riesz_transform(u: Field, j: int) -> Field:
    """Riesz transform ``R_j`` with symbol ``-i k_j / |k|`` (axes numbered from 1)."""
    a = _check_axis(u, j)
    spec = MultiplierSpec(lambda k: -1j * k[a] / wavevector_norm(k), "zero",
                          odd=True, name=f"R_{j}")
    return apply_multiplier(u, spec)


def partial(u: Field, j: int) -> Field:
    """Spectral derivative along axis ``j`` (numbered from 1)."""
    a = _check_axis(u, j)
    return apply_multiplier(u, MultiplierSpec(lambda k: 1j * k[a], "zero", odd=True,
                                              name=f"d_{j}"))


def lebesgue_norm(u: Field, r: float) -> float:
    """``(sum_x |u(x)|^r h^n)^{1/r}``; vector fields use the pointwise Euclidean length."""
    r = float(r)
    if math.isnan(r) or r < 1:
        raise BadExponent(f"Lebesgue exponent must be >= 1, got {r}")
    a = u.magnitude() if isinstance(u, VectorField) else np.abs(u.samples)
    return _lebesgue_from_abs(a, r, u.grid.cell_volume)


def _lebesgue_from_abs(a: np.ndarray, r: float, cell: float) -> float:
    top = float(a.max()) if a.size else 0.0
    if r == math.inf or top == 0.0:
        return top
    # rescale by the max so large r does not overflow
    return top * float(np.sum((a / top) ** r) * cell) ** (1.0 / r)


def _sobolev_weight(grid: Grid, s: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        w = grid.kmag ** (2 * s)
    w[(0,) * grid.dim] = 1.0 if s == 0 else 0.0
    return w


def sobolev_norm(u: Field, s: float) -> float:
    """Homogeneous ``H^s`` norm ``(L^n sum_k |k|^{2s} |c_k|^2)^{1/2}``.

    At ``s = 0`` the zero mode is kept, so the result equals the ``L^2`` norm.
    For ``s < 0`` the field must be mean-zero.
    """
    s = float(s)
    if s < 0:
        check_mean_zero(u)
    w = _sobolev_weight(u.grid, s)
    c = _component_coefficients(u)
    return math.sqrt(u.grid.volume * float(np.sum(w * np.abs(c) ** 2)))


def sobolev_lp_norm(u: Field, s: float, p: float) -> float:
    """``||(-Delta)^{s/2} u||_{L^p}`` for ``1 <= p < inf``."""
    p = float(p)
    if not 1 <= p < math.inf:
        raise BadExponent(f"Sobolev-Lp exponent must lie in [1, inf), got {p}")
    return lebesgue_norm(fractional_laplacian(u, s), p)


def band_limit(u: Field, cutoff: float) -> Field:
    """Zero every coefficient whose lattice index has Euclidean norm above ``cutoff``."""
    keep = u.grid.index_norm <= cutoff
    return _rebuild(u, u.coefficients * keep)


def _pad_maps(N: int, P: int):
    m = np.fft.fftfreq(N, 1.0 / N).round().astype(np.int64)
    keep = m != -N // 2
    return np.nonzero(keep)[0], m[keep] % P


def dealiased_product(a: ScalarField, b: ScalarField) -> ScalarField:
    """Pointwise product evaluated on a 3/2-oversampled grid, then truncated.

    Nyquist coefficients of the inputs are dropped; the result is exact for
    inputs whose combined bandwidth stays below ``N/2``.
    """
    if a.grid != b.grid:
        raise DimensionMismatch("fields live on different grids")
    grid = a.grid
    N, n = grid.n_points, grid.dim
    P = 3 * N // 2
    src, dst = _pad_maps(N, P)
    src_ix, dst_ix = np.ix_(*[src] * n), np.ix_(*[dst] * n)

    def upsample(c):
        big = np.zeros((P,) * n, dtype=complex)
        big[dst_ix] = c[src_ix]
        return _ifft(big, None) * P ** n

    prod_hat = _fft(upsample(a.coefficients) * upsample(b.coefficients), None) / P ** n
    out = np.zeros(grid.shape, dtype=complex)
    out[src_ix] = prod_hat[dst_ix]
    return ScalarField.from_coefficients(grid, out)
