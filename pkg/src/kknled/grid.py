"""Periodic Cartesian grid, vector/scalar field containers, and the discrete
differential operators shared by every dynamical module.

All fields live on a collocated periodic grid (no staggering).  Derivatives
use 4th-order centered differences,

    f'(x) ~ [ -f(x+2h) + 8 f(x+h) - 8 f(x-h) + f(x-2h) ] / (12 h),

applied per axis with periodic wraparound.  Because the three 1-d stencils
commute as circulant operators, the discrete identities div(curl w) = 0 and
curl(grad f) = 0 hold to round-off, which keeps div B <= round-off during
evolution when B is built from a discrete curl.

Arrays are stored x-fastest (Fortran order, index = x + nx*(y + ny*z)), both
in memory and in the binary snapshot format.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

SNAPSHOT_MAGIC = b"KKNLED1\x00"

_C1 = 8.0 / 12.0
_C2 = 1.0 / 12.0

STENCIL_ORDER = 4


class GridMismatchError(ValueError):
    """Raised when an operation mixes fields from different grids."""


@dataclass(frozen=True)
class GridSpec:
    """Periodic box with nx*ny*nz collocated cells and side lengths lx, ly, lz."""

    nx: int
    ny: int
    nz: int
    lx: float = 1.0
    ly: float = 1.0
    lz: float = 1.0

    def __post_init__(self):
        for n in (self.nx, self.ny, self.nz):
            if int(n) != n or n < 4:
                raise ValueError(f"cell counts must be integers >= 4, got {n}")
        for length in (self.lx, self.ly, self.lz):
            if not (length > 0.0):
                raise ValueError(f"box lengths must be positive, got {length}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def dz(self) -> float:
        return self.lz / self.nz

    @property
    def spacings(self) -> tuple[float, float, float]:
        return (self.dx, self.dy, self.dz)

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @property
    def center(self) -> np.ndarray:
        return np.array([0.5 * self.lx, 0.5 * self.ly, 0.5 * self.lz])

    def axis(self, i: int) -> np.ndarray:
        """Node coordinates along axis i (0, 1, 2)."""
        n = self.shape[i]
        return np.arange(n) * self.spacings[i]

    def meshgrid(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Full (nx, ny, nz) coordinate arrays X, Y, Z in storage order."""
        x, y, z = (self.axis(i) for i in range(3))
        X, Y, Z = np.meshgrid(x, y, z, indexing="ij")
        return (np.asfortranarray(X), np.asfortranarray(Y), np.asfortranarray(Z))


def _field_array(grid: GridSpec, values: np.ndarray) -> np.ndarray:
    arr = np.asfortranarray(values, dtype=np.float64)
    if arr.shape != grid.shape:
        raise ValueError(f"array shape {arr.shape} does not match grid {grid.shape}")
    return arr


@dataclass
class ScalarField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        self.values = _field_array(self.grid, self.values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "ScalarField":
        return cls(grid, np.zeros(grid.shape, order="F"))

    def validate_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("scalar field contains non-finite entries")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass
class Vec3Field:
    grid: GridSpec
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        self.x = _field_array(self.grid, self.x)
        self.y = _field_array(self.grid, self.y)
        self.z = _field_array(self.grid, self.z)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "Vec3Field":
        return cls(grid, *(np.zeros(grid.shape, order="F") for _ in range(3)))

    @classmethod
    def from_components(cls, grid: GridSpec, comps) -> "Vec3Field":
        cx, cy, cz = comps
        return cls(grid, cx, cy, cz)

    @property
    def components(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.x, self.y, self.z)

    def copy(self) -> "Vec3Field":
        return Vec3Field(self.grid, self.x.copy(), self.y.copy(), self.z.copy())

    def validate_finite(self):
        for c in self.components:
            if not np.all(np.isfinite(c)):
                raise ValueError("vector field contains non-finite entries")

    def dot(self, other: "Vec3Field") -> np.ndarray:
        _check_same_grid(self, other)
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm2(self) -> np.ndarray:
        return self.x * self.x + self.y * self.y + self.z * self.z

    def max_abs(self) -> float:
        return max(float(np.max(np.abs(c))) for c in self.components)

    def scaled(self, a: float) -> "Vec3Field":
        return Vec3Field(self.grid, a * self.x, a * self.y, a * self.z)


def _check_same_grid(*fields):
    g0 = fields[0].grid
    for f in fields[1:]:
        if f.grid != g0:
            raise GridMismatchError("fields do not share one grid")


def diff4(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """4th-order centered first derivative along one axis, periodic."""
    p1 = np.roll(values, -1, axis)
    m1 = np.roll(values, 1, axis)
    p2 = np.roll(values, -2, axis)
    m2 = np.roll(values, 2, axis)
    return (_C1 * (p1 - m1) - _C2 * (p2 - m2)) / spacing


def grad(f: ScalarField) -> Vec3Field:
    g = f.grid
    return Vec3Field(g, diff4(f.values, 0, g.dx), diff4(f.values, 1, g.dy),
                     diff4(f.values, 2, g.dz))


def div(v: Vec3Field) -> ScalarField:
    g = v.grid
    out = diff4(v.x, 0, g.dx)
    out += diff4(v.y, 1, g.dy)
    out += diff4(v.z, 2, g.dz)
    return ScalarField(g, out)


def curl(v: Vec3Field) -> Vec3Field:
    g = v.grid
    cx = diff4(v.z, 1, g.dy) - diff4(v.y, 2, g.dz)
    cy = diff4(v.x, 2, g.dz) - diff4(v.z, 0, g.dx)
    cz = diff4(v.y, 0, g.dx) - diff4(v.x, 1, g.dy)
    return Vec3Field(g, cx, cy, cz)


def integrate(f: ScalarField) -> float:
    """Volume integral sum(f) * dx*dy*dz in a fixed, platform-independent order.

    The summation runs over the contiguous storage order (x-fastest) with
    numpy's pairwise algorithm, so the result is bit-identical regardless of
    how stencil work was parallelized.
    """
    flat = f.values.ravel(order="F")
    return float(np.sum(flat)) * f.grid.cell_volume


def integrate_values(grid: GridSpec, values: np.ndarray) -> float:
    return integrate(ScalarField(grid, values))


def pairwise_sum(values: np.ndarray) -> float:
    """Reference fixed-order pairwise summation (recursive halving).

    Mirrors the reduction order used by `integrate`; kept as an explicit,
    dependency-free oracle for bit-reproducibility checks.
    """
    flat = np.ascontiguousarray(values.ravel(order="F"), dtype=np.float64)

    def rec(a: np.ndarray) -> float:
        n = a.size
        if n <= 8:
            s = 0.0
            for i in range(n):
                s += a[i]
            return s
        half = n // 2
        return rec(a[:half]) + rec(a[half:])

    return rec(flat)


# ---------------------------------------------------------------------------
# Binary snapshot format
# ---------------------------------------------------------------------------
# little-endian header:
#   8 bytes  magic "KKNLED1\0"
#   3 x u64  nx, ny, nz
#   3 x f64  lx, ly, lz
#   1 x u64  component count
# followed by each component as raw float64 in storage order
# (index = x + nx*(y + ny*z)).

_HEADER = struct.Struct("<8s3Q3dQ")


def write_snapshot(path, grid: GridSpec, components) -> None:
    comps = [_field_array(grid, c) for c in components]
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, grid.nx, grid.ny, grid.nz,
                              grid.lx, grid.ly, grid.lz, len(comps)))
        for c in comps:
            fh.write(np.ascontiguousarray(c.ravel(order="F"), dtype="<f8").tobytes())


def read_snapshot(path) -> tuple[GridSpec, list[np.ndarray]]:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, nx, ny, nz, lx, ly, lz, ncomp = _HEADER.unpack(header)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"bad snapshot magic {magic!r}")
        grid = GridSpec(nx, ny, nz, lx, ly, lz)
        comps = []
        count = grid.n_cells
        for _ in range(ncomp):
            raw = np.frombuffer(fh.read(8 * count), dtype="<f8")
            comps.append(np.asfortranarray(raw.reshape(grid.shape, order="F")))
    return grid, comps
