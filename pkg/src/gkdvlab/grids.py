"""Uniform 1D grids, sampled fields, quadrature, differentiation, resampling.

Two grid kinds are supported.  Periodic grids (power-of-two size) back the
pseudo-spectral time evolution; bounded grids back the profile ODE solves,
where functions are assumed to decay (or settle to a constant) before the
edges.  Points are y_k = -L + k*h with h = 2L/n for both kinds, so a
periodic grid covers one full period and a bounded grid covers [-L, L-h].
"""

from __future__ import annotations

import functools
import struct
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import make_interp_spline

from .errors import (CoverageError, GridMismatchError, UnsupportedOrderError)

PERIODIC = "periodic"
BOUNDED = "bounded"

_SNAPSHOT_MAGIC = b"GKDV1\n"
_KIND_CODE = {PERIODIC: 0, BOUNDED: 1}
_KIND_FROM_CODE = {0: PERIODIC, 1: BOUNDED}


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L) with n points."""

    n: int
    half_length: float
    kind: str = BOUNDED

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"grid too small: n={self.n}")
        if self.half_length <= 0:
            raise ValueError("half_length must be positive")
        if self.kind not in (PERIODIC, BOUNDED):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.kind == PERIODIC and self.n & (self.n - 1):
            raise ValueError("periodic grids require a power-of-two size")

    @property
    def h(self) -> float:
        return 2.0 * self.half_length / self.n

    @property
    def points(self) -> np.ndarray:
        return -self.half_length + self.h * np.arange(self.n)

    def field(self, values) -> "Field":
        return Field(self, np.asarray(values, dtype=float))

    def zeros(self) -> "Field":
        return Field(self, np.zeros(self.n))

    def sample(self, fn) -> "Field":
        return Field(self, np.asarray(fn(self.points), dtype=float))


class Field:
    """Real-valued function sampled on a grid.  Immutable after creation."""

    __slots__ = ("grid", "_values", "warnings")

    def __init__(self, grid: Grid, values, warnings: tuple = ()):
        values = np.ascontiguousarray(values, dtype=float)
        if values.shape != (grid.n,):
            raise ValueError(f"expected {grid.n} values, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "_values", values)
        object.__setattr__(self, "warnings", tuple(warnings))

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def y(self) -> np.ndarray:
        return self.grid.points

    def _check_same_grid(self, other: "Field"):
        if self.grid != other.grid:
            raise GridMismatchError(
                f"grids differ: {self.grid} vs {other.grid}")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check_same_grid(other)
            return Field(self.grid, self._values + other._values)
        return Field(self.grid, self._values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check_same_grid(other)
            return Field(self.grid, self._values - other._values)
        return Field(self.grid, self._values - other)

    def __rsub__(self, other):
        return Field(self.grid, other - self._values)

    def __mul__(self, other):
        if isinstance(other, Field):
            self._check_same_grid(other)
            return Field(self.grid, self._values * other._values)
        return Field(self.grid, self._values * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Field):
            self._check_same_grid(other)
            return Field(self.grid, self._values / other._values)
        return Field(self.grid, self._values / other)

    def __neg__(self):
        return Field(self.grid, -self._values)

    def __pow__(self, p):
        return Field(self.grid, self._values ** p)

    def __repr__(self):
        return (f"Field(n={self.grid.n}, L={self.grid.half_length}, "
                f"{self.grid.kind}, sup={np.max(np.abs(self._values)):.3e})")

    # convenience wrappers around the module-level operations
    def differentiate(self, order: int = 1) -> "Field":
        return differentiate(self, order)

    def integrate(self) -> float:
        return integrate(self)


# ---------------------------------------------------------------------------
# finite-difference machinery (bounded grids)

def fd_weights(x: np.ndarray, x0: float, m: int) -> np.ndarray:
    """Fornberg weights for the m-th derivative at x0 from nodes x."""
    n = len(x)
    w = np.zeros((m + 1, n))
    w[0, 0] = 1.0
    c1 = 1.0
    c4 = x[0] - x0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    w[k, i] = c1 * (k * w[k - 1, i - 1]
                                    - c5 * w[k, i - 1]) / c2
                w[0, i] = -c1 * c5 * w[0, i - 1] / c2
            for k in range(mn, 0, -1):
                w[k, j] = (c4 * w[k, j] - k * w[k - 1, j]) / c3
            w[0, j] = c4 * w[0, j] / c3
        c1 = c2
    return w[m]


# interior stencil half-widths giving 6th-order accuracy (the profile
# identity tolerances need more than 4th order at the default spacing)
_HALF_WIDTH = {1: 3, 2: 3, 3: 4}
# one-sided stencil widths giving 6th-order accuracy
_EDGE_WIDTH = {1: 7, 2: 8, 3: 9}


@functools.lru_cache(maxsize=64)
def _bounded_stencils(h: float, order: int):
    hw = _HALF_WIDTH[order]
    idx = np.arange(-hw, hw + 1) * h
    interior = fd_weights(idx, 0.0, order)
    ew = _EDGE_WIDTH[order]
    nodes = np.arange(ew) * h
    left = np.array([fd_weights(nodes, i * h, order) for i in range(hw)])
    # mirror for the right edge: reverse rows and columns, flip sign if odd
    right = left[::-1, ::-1] * (-1.0 if order % 2 else 1.0)
    return interior, left, right


def _differentiate_bounded(f: Field, order: int) -> Field:
    interior, left, right = _bounded_stencils(f.grid.h, order)
    hw = _HALF_WIDTH[order]
    out = np.empty(f.grid.n)
    out[hw:-hw] = np.convolve(f.values, interior[::-1], mode="valid")
    ew = left.shape[1]
    out[:hw] = left @ f.values[:ew]
    out[-hw:] = right @ f.values[-ew:]
    return Field(f.grid, out)


def spectral_wavenumbers(grid: Grid) -> np.ndarray:
    """rfft wavenumbers k_j = j*pi/L for a periodic grid."""
    return np.arange(grid.n // 2 + 1) * (np.pi / grid.half_length)


def _differentiate_periodic(f: Field, order: int) -> Field:
    k = spectral_wavenumbers(f.grid)
    sym = (1j * k) ** order
    if order % 2:
        sym[-1] = 0.0  # Nyquist mode has no well-defined odd derivative
    out = np.fft.irfft(sym * np.fft.rfft(f.values), n=f.grid.n)
    return Field(f.grid, out)


def differentiate(f: Field, order: int = 1) -> Field:
    """Spectral (periodic) or 4th-order FD (bounded) derivative."""
    if not 1 <= order <= 3:
        raise UnsupportedOrderError(f"order {order} not supported (1..3)")
    if f.grid.kind == PERIODIC:
        return _differentiate_periodic(f, order)
    return _differentiate_bounded(f, order)


def integrate(f: Field) -> float:
    """Quadrature over the grid: rectangle (periodic), trapezoid (bounded)."""
    if f.grid.kind == PERIODIC:
        return f.grid.h * float(np.sum(f.values))
    v = f.values
    return f.grid.h * (float(np.sum(v)) - 0.5 * (v[0] + v[-1]))


def inner(f: Field, g: Field) -> float:
    """L2 scalar product (f, g) = integral of f*g."""
    f._check_same_grid(g)
    return integrate(Field(f.grid, f.values * g.values))


def norm2(f: Field) -> float:
    """L2 norm."""
    return float(np.sqrt(max(inner(f, f), 0.0)))


def cumulative_from_right(f: Field) -> Field:
    """F(y_k) = integral of f from y_k to the right edge; F(edge) = 0.

    Accumulated through the antiderivative of the quintic interpolating
    spline, which keeps the running integral at interpolation accuracy
    (plain trapezoid sums would cap the profile identities at O(h^2)).
    """
    if f.grid.kind != BOUNDED:
        raise GridMismatchError("cumulative_from_right needs a bounded grid")
    v = f.values
    anti = make_interp_spline(f.grid.points, v, k=5).antiderivative()
    out = float(anti(f.grid.points[-1])) - anti(f.grid.points)
    out[-1] = 0.0
    warns = ()
    sup = np.max(np.abs(v))
    if sup > 0 and np.max(np.abs(v[-2:])) > 1e-10 * sup:
        warns = ("tail-truncation: integrand not decayed at right edge",)
    return Field(f.grid, out, warnings=warns)


# ---------------------------------------------------------------------------
# interpolation / resampling

def _spline(f: Field):
    y = f.grid.points
    if f.grid.kind == PERIODIC:
        ye = np.append(y, y[0] + 2.0 * f.grid.half_length)
        ve = np.append(f.values, f.values[0])
        return make_interp_spline(ye, ve, k=5, bc_type="periodic")
    return make_interp_spline(y, f.values, k=5)


def sample_at(f: Field, pts: np.ndarray) -> np.ndarray:
    """Quintic-spline samples of f at arbitrary points; zero outside support.

    Returns (values, n_outside).  Periodic sources wrap, so nothing is
    ever outside their support.
    """
    spl = _spline(f)
    pts = np.asarray(pts, dtype=float)
    if f.grid.kind == PERIODIC:
        L = f.grid.half_length
        wrapped = np.mod(pts + L, 2.0 * L) - L
        return spl(wrapped), 0
    lo = f.grid.points[0]
    hi = f.grid.points[-1]
    out = spl(np.clip(pts, lo, hi))
    outside = (pts < lo) | (pts > hi)
    out[outside] = 0.0
    return out, int(np.sum(outside))


def resample(f: Field, target: Grid, shift: float = 0.0,
             scale: float = 1.0) -> Field:
    """g(y) = f(scale*y + shift) on the target grid."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    pts = scale * target.points + shift
    vals, n_outside = sample_at(f, pts)
    if n_outside > 0.01 * target.n:
        raise CoverageError(
            f"{n_outside}/{target.n} target points outside source support")
    return Field(target, vals)


# ---------------------------------------------------------------------------
# snapshot persistence (GKDV1 format)

def write_snapshot(path, f: Field, time: float = 0.0):
    """GKDV1 binary snapshot: magic, u64 n, f64 L, u8 kind, f64 t, values."""
    with open(path, "wb") as fh:
        fh.write(_SNAPSHOT_MAGIC)
        fh.write(struct.pack("<QdBd", f.grid.n, f.grid.half_length,
                             _KIND_CODE[f.grid.kind], time))
        fh.write(f.values.astype("<f8").tobytes())


def read_snapshot(path):
    """Read a GKDV1 snapshot; returns (field, time)."""
    with open(path, "rb") as fh:
        magic = fh.read(len(_SNAPSHOT_MAGIC))
        if magic != _SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a GKDV1 snapshot")
        n, half_length, kind_code, time = struct.unpack(
            "<QdBd", fh.read(struct.calcsize("<QdBd")))
        raw = fh.read(8 * n)
        if len(raw) != 8 * n:
            raise ValueError(f"{path}: truncated snapshot")
        values = np.frombuffer(raw, dtype="<f8")
    grid = Grid(int(n), half_length, _KIND_FROM_CODE[int(kind_code)])
    return Field(grid, values), time


# default resolutions: profiles on bounded, evolution on periodic
def default_profile_grid(n: int = 4096, half_length: float = 25.0) -> Grid:
    return Grid(n, half_length, BOUNDED)


def default_evolution_grid(n: int = 8192, half_length: float = 100.0) -> Grid:
    return Grid(n, half_length, PERIODIC)
