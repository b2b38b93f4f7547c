"""Uniform grids, sampled complex fields, quadrature and Fourier transforms.

Conventions used throughout the package:

* real-line axes carry N (even) nodes x_j = -L + j*(2L/N) and quadrature
  weight 2L/N per node; fields are assumed numerically supported inside
  [-L, L] so the periodic Riemann sum is spectrally accurate,
* torus axes carry N nodes t_j = 2*pi*j/N and weight 2*pi/N; the measure
  "mu" divides by (2*pi)^m, one factor per torus axis,
* the Fourier transform on d transformed real axes is unitary,
  fhat(xi) = (2*pi)^(-d/2) * int e^(-i x.xi) f(x) dx, sampled on the dual
  lattice xi_r = pi*r/L, r = -N/2 .. N/2-1,
* torus coefficients follow f(t) = sum_k e^(-i k.t) f^k with
  f^k = int e^(+i k.t) f(t) dt / (2*pi)^m.

All objects are immutable after construction and every function is pure, so
concurrent use needs no coordination.  Reductions are plain numpy sums in a
fixed axis order, hence bit-stable run to run.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AxisKindMismatch, GridMismatch, IoFailure

LINE = "line"
TORUS = "torus"


@dataclass(frozen=True)
class Axis:
    """One grid axis: a truncated real line or the circle [0, 2*pi)."""

    kind: str
    n: int
    half_extent: float = 0.0  # L for line axes, unused for torus

    def __post_init__(self):
        if self.kind not in (LINE, TORUS):
            raise AxisKindMismatch(f"unknown axis kind {self.kind!r}")
        if self.n < 4 or self.n % 2:
            raise GridMismatch(f"axis needs an even node count >= 4, got {self.n}")
        if self.kind == LINE and self.half_extent <= 0:
            raise GridMismatch("line axis needs a positive half extent")

    @property
    def nodes(self) -> np.ndarray:
        if self.kind == LINE:
            return -self.half_extent + self.spacing * np.arange(self.n)
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def spacing(self) -> float:
        if self.kind == LINE:
            return 2.0 * self.half_extent / self.n
        return 2.0 * np.pi / self.n

    @property
    def weight(self) -> float:
        # uniform Riemann weight; exact for trigonometric polynomials on TORUS
        return self.spacing

    def dual(self) -> "Axis":
        """Frequency axis of the unitary transform: spacing pi/L, extent pi/dx."""
        if self.kind != LINE:
            raise AxisKindMismatch("only line axes have a dual axis")
        return Axis(LINE, self.n, np.pi / self.spacing)

    @property
    def dual_nodes(self) -> np.ndarray:
        d = self.dual()
        return d.nodes


def line_axis(half_extent: float, n: int) -> Axis:
    return Axis(LINE, n, half_extent)


def torus_axis(n: int) -> Axis:
    return Axis(TORUS, n)


@dataclass(frozen=True)
class Grid:
    axes: tuple

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))

    @property
    def shape(self):
        return tuple(ax.n for ax in self.axes)

    @property
    def ndim(self):
        return len(self.axes)

    @property
    def n_torus(self):
        return sum(1 for ax in self.axes if ax.kind == TORUS)

    def nodes(self, i: int) -> np.ndarray:
        return self.axes[i].nodes

    def cell_weight(self) -> float:
        w = 1.0
        for ax in self.axes:
            w *= ax.weight
        return w

    def meshgrid(self):
        return np.meshgrid(*[ax.nodes for ax in self.axes], indexing="ij")


def grid(*axes: Axis) -> Grid:
    return Grid(tuple(axes))


class Field:
    """Complex samples of a function over a Grid (row-major axis order)."""

    __slots__ = ("grid", "values")

    def __init__(self, grid_: Grid, values: np.ndarray):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != grid_.shape:
            raise GridMismatch(f"value shape {values.shape} != grid shape {grid_.shape}")
        self.grid = grid_
        self.values = values
        self.values.setflags(write=False)

    # ------------------------------------------------------------------
    # construction helpers
    # ------------------------------------------------------------------
    @staticmethod
    def sample(grid_: Grid, fn) -> "Field":
        """Sample fn(*coordinate arrays) on the grid."""
        mesh = grid_.meshgrid()
        return Field(grid_, np.asarray(fn(*mesh), dtype=np.complex128))

    @staticmethod
    def zeros(grid_: Grid) -> "Field":
        return Field(grid_, np.zeros(grid_.shape, dtype=np.complex128))

    def with_values(self, values: np.ndarray) -> "Field":
        return Field(self.grid, values)

    # ------------------------------------------------------------------
    # quadrature
    # ------------------------------------------------------------------
    def _measure_factor(self, measure: str) -> float:
        if measure == "lebesgue":
            return 1.0
        if measure == "mu":
            return (2.0 * np.pi) ** (-self.grid.n_torus)
        raise GridMismatch(f"unknown measure {measure!r}")

    def integrate(self, measure: str = "lebesgue") -> complex:
        return complex(self.values.sum() * self.grid.cell_weight() * self._measure_factor(measure))

    def inner(self, other: "Field", measure: str = "lebesgue") -> complex:
        """<f, g> = int f conj(g)."""
        if other.grid.shape != self.grid.shape:
            raise GridMismatch("inner product needs matching grids")
        s = np.vdot(other.values, self.values)  # sum conj(g) * f
        return complex(s * self.grid.cell_weight() * self._measure_factor(measure))

    def norm(self, measure: str = "lebesgue") -> float:
        return float(np.sqrt(max(self.inner(self, measure).real, 0.0)))

    # ------------------------------------------------------------------
    # Fourier transforms on line axes
    # ------------------------------------------------------------------
    def fourier(self, axes=None, sign: int = -1) -> "Field":
        """Unitary Fourier transform along the given line axes.

        sign=-1 is the forward transform e^(-i x.xi); sign=+1 the inverse.
        Sampled exactly on the dual lattice via FFT with phase corrections,
        so forward followed by inverse is an exact identity and the discrete
        Parseval identity holds to rounding.
        """
        if axes is None:
            axes = [i for i, ax in enumerate(self.grid.axes) if ax.kind == LINE]
        vals = self.values
        new_axes = list(self.grid.axes)
        for i in axes:
            ax = self.grid.axes[i]
            if ax.kind != LINE:
                raise AxisKindMismatch("fourier transforms only line axes")
            n = ax.n
            j = np.arange(n)
            # nodes x_j = -L + j dx, dual nodes xi_s = (s - n/2) pi / L
            pre = (-1.0) ** j
            post = (-1.0) ** (j + n // 2)
            shape = [1] * vals.ndim
            shape[i] = n
            if sign < 0:
                scale = ax.weight / np.sqrt(2.0 * np.pi)
                v = np.fft.fft(vals * pre.reshape(shape), axis=i)
            else:
                scale = ax.weight * n / np.sqrt(2.0 * np.pi) / n
                v = np.fft.ifft(vals * pre.reshape(shape), axis=i) * n
            vals = v * post.reshape(shape) * scale
            new_axes[i] = ax.dual()
        return Field(Grid(tuple(new_axes)), vals)

    def inverse_fourier(self, axes=None) -> "Field":
        return self.fourier(axes=axes, sign=+1)

    # ------------------------------------------------------------------
    # torus coefficients
    # ------------------------------------------------------------------
    def _torus_axes(self):
        return [i for i, ax in enumerate(self.grid.axes) if ax.kind == TORUS]

    def torus_modes(self) -> tuple:
        """All coefficients f^k at once.

        Returns (freqs, coeffs) where freqs[i] is the integer frequency array
        of the i-th torus axis (fft order) and coeffs has the torus axes
        replaced by mode axes.  Exact when f is a trigonometric polynomial of
        degree < N_t/2 along each torus axis.
        """
        taxes = self._torus_axes()
        vals = self.values
        freqs = []
        for i in taxes:
            n = self.grid.axes[i].n
            # f^k = (1/N) sum_j f(t_j) e^{+2 pi i j k / N}
            vals = np.fft.ifft(vals, axis=i)
            freqs.append(np.fft.fftfreq(n, d=1.0 / n).astype(int))
        return freqs, vals

    def torus_coeff(self, k) -> "Field":
        """f^k on the grid with the torus axes removed (k may be int for m=1)."""
        taxes = self._torus_axes()
        if not taxes:
            raise AxisKindMismatch("torus_coeff needs at least one torus axis")
        kvec = np.atleast_1d(np.asarray(k, dtype=int))
        if kvec.size != len(taxes):
            raise GridMismatch(f"k has {kvec.size} entries for {len(taxes)} torus axes")
        freqs, coeffs = self.torus_modes()
        idx = [slice(None)] * coeffs.ndim
        for (i, ki, fr) in zip(taxes, kvec, freqs):
            n = self.grid.axes[i].n
            if abs(int(ki)) > n // 2:
                # outside the resolvable band: coefficient of a band-limited
                # field is exactly zero
                keep = [ax for j, ax in enumerate(self.grid.axes) if j not in taxes]
                newgrid = Grid(tuple(keep))
                return Field.zeros(newgrid)
            idx[i] = int(ki) % n
        out = coeffs[tuple(idx)]
        keep = [ax for j, ax in enumerate(self.grid.axes) if j not in taxes]
        return Field(Grid(tuple(keep)), out)

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------
    def dump(self, path) -> None:
        """Write float64 little-endian interleaved complex plus a JSON sidecar."""
        path = Path(path)
        try:
            raw = np.empty(self.values.size * 2, dtype="<f8")
            raw[0::2] = self.values.real.ravel()
            raw[1::2] = self.values.imag.ravel()
            path.write_bytes(raw.tobytes())
            sidecar = {
                "format": "rhg-field",
                "version": 1,
                "axes": [
                    {"kind": ax.kind, "n": ax.n, "half_extent": ax.half_extent}
                    for ax in self.grid.axes
                ],
            }
            path.with_suffix(path.suffix + ".json").write_text(
                json.dumps(sidecar, sort_keys=True, indent=1) + "\n"
            )
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    @staticmethod
    def load(path) -> "Field":
        path = Path(path)
        try:
            meta = json.loads(path.with_suffix(path.suffix + ".json").read_text())
            axes = tuple(
                Axis(a["kind"], a["n"], a.get("half_extent", 0.0)) for a in meta["axes"]
            )
            g = Grid(axes)
            raw = np.frombuffer(path.read_bytes(), dtype="<f8")
            vals = raw[0::2] + 1j * raw[1::2]
            return Field(g, vals.reshape(g.shape))
        except (OSError, KeyError, ValueError) as exc:
            raise IoFailure(str(exc)) from exc

    def export_csv(self, path) -> None:
        """CSV of node coordinates and values; 1-D or 2-D grids only."""
        if self.grid.ndim > 2:
            raise IoFailure("csv export supports 1-D and 2-D slices only")
        try:
            with open(path, "w") as fh:
                if self.grid.ndim == 1:
                    fh.write("x,re,im\n")
                    for x, v in zip(self.grid.nodes(0), self.values):
                        fh.write(f"{x!r},{v.real!r},{v.imag!r}\n")
                else:
                    fh.write("x0,x1,re,im\n")
                    n0 = self.grid.nodes(0)
                    n1 = self.grid.nodes(1)
                    for i in range(len(n0)):
                        for j in range(len(n1)):
                            v = self.values[i, j]
                            fh.write(f"{n0[i]!r},{n1[j]!r},{v.real!r},{v.imag!r}\n")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc


# ----------------------------------------------------------------------
# semidiscrete Fourier evaluation at arbitrary frequencies
# ----------------------------------------------------------------------
def ft_at(field: Field, targets, sign: int = -1, check_nyquist: bool = True) -> np.ndarray:
    """Evaluate the (unitary) Fourier transform of a line-axis field at an
    arbitrary product lattice of frequencies.

    targets is a list of 1-D arrays, one per axis.  The Riemann sum
    (2 pi)^(-d/2) sum_j f(x_j) e^(sign * i x_j xi) prod dx is evaluated by
    chained matrix products, which for box-supported smooth fields is the
    trigonometric (band-limited) interpolant of the FFT samples.  Targets
    beyond the Nyquist frequency pi/dx alias and are rejected.
    """
    from .errors import InterpolationOverflow

    vals = field.values
    d = field.grid.ndim
    targets = [np.atleast_1d(np.asarray(t, dtype=float)) for t in targets]
    if len(targets) != d:
        raise GridMismatch("one target array per axis required")
    scale = 1.0
    for i in range(d):
        ax = field.grid.axes[i]
        if ax.kind != LINE:
            raise AxisKindMismatch("ft_at transforms line axes only")
        nyq = np.pi / ax.spacing
        if check_nyquist and np.any(np.abs(targets[i]) > nyq * (1 + 1e-12)):
            raise InterpolationOverflow(
                f"target frequency exceeds Nyquist {nyq:.4g} on axis {i}"
            )
        e = np.exp(sign * 1j * np.outer(targets[i], ax.nodes))
        vals = np.tensordot(e, vals, axes=([1], [i]))
        # tensordot put the transformed axis in front; rotate it back
        vals = np.moveaxis(vals, 0, i)
        scale *= ax.weight / np.sqrt(2.0 * np.pi)
    return vals * scale


def field_at(field: Field, points) -> np.ndarray:
    """Band-limited (trigonometric) interpolation of a line-axis field at an
    arbitrary product lattice of points, via its FFT samples."""
    fhat = field.fourier()
    d = field.grid.ndim
    points = [np.atleast_1d(np.asarray(p, dtype=float)) for p in points]
    vals = fhat.values
    scale = 1.0
    for i in range(d):
        ax = fhat.grid.axes[i]
        e = np.exp(1j * np.outer(points[i], ax.nodes))
        vals = np.tensordot(e, vals, axes=([1], [i]))
        vals = np.moveaxis(vals, 0, i)
        scale *= ax.weight / np.sqrt(2.0 * np.pi)
    return vals * scale
