"""Schroedinger representations, the group Fourier transform and its inverse.

For a nonzero integer vector k the representation acts on L^2(R^n) by

    (pi_k(q, p, t) phi)(x) = e^{i k.t} e^{i q.B_k(x + p/2)} phi(x + p),

with B_k = k_1 B_1 + ... + k_m B_m.  The group Fourier transform of an
integrable f on G is the integral operator

    Ff(k) phi = int f^k(q, p) pi_k(q, p) phi  dq dp,

realized as the kernel

    N_k(x, y) = (2 pi)^(n/2) (F_1 f^k)(-B_k (x + y)/2, y - x),

where F_1 is the unitary Fourier transform in the first n variables.  The
kernel is assembled by evaluating the semidiscrete transform of f^k at the
exact coordinate-changed frequencies, which keeps the Plancherel identity

    sum_k ||Ff(k)||_HS^2 (2 pi)^(-n) ||k||^n = ||f - f^0||^2_mu

accurate to quadrature precision.  Weighted spectral quantities (HS norms,
singular values, traces) use the matrix D^{1/2} N D^{1/2} with D the
quadrature weights, the discrete operator unitarily equivalent to the
integral operator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import GroupElement, OrthFamily, _lattice_shift
from .errors import (
    DimensionMismatch,
    GridMismatch,
    InterpolationOverflow,
    IoFailure,
    SupportOverflow,
    TruncationTooSmall,
)
from .fields import LINE, TORUS, Axis, Field, Grid


# ----------------------------------------------------------------------
# frequency indices
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class FreqIndex:
    k: tuple

    def __post_init__(self):
        kv = tuple(int(x) for x in np.atleast_1d(np.asarray(self.k)))
        if not any(kv):
            raise DimensionMismatch("frequency index must be nonzero")
        object.__setattr__(self, "k", kv)

    @property
    def norm(self) -> float:
        return float(np.sqrt(sum(x * x for x in self.k)))

    @property
    def vec(self) -> np.ndarray:
        return np.asarray(self.k, dtype=float)


def as_freq(k, m: int = None) -> FreqIndex:
    f = k if isinstance(k, FreqIndex) else FreqIndex(tuple(np.atleast_1d(k)))
    if m is not None and len(f.k) != m:
        raise DimensionMismatch(f"frequency index has {len(f.k)} entries, expected {m}")
    return f


def alpha_weight(k, n: int) -> float:
    """Plancherel weight (2 pi)^(-n) ||k||^n attached to the slot k."""
    return (2.0 * np.pi) ** (-n) * as_freq(k).norm ** n


# ----------------------------------------------------------------------
# kernel operators on L^2(R^n)
# ----------------------------------------------------------------------
class KernelOp:
    """Discretized integral kernel K(x, y) of an operator on L^2(R^n).

    values has shape x-grid + x-grid (2n axes); (K phi)(x) =
    sum_y K(x, y) phi(y) w_y.
    """

    __slots__ = ("grid_x", "values")

    def __init__(self, grid_x: Grid, values: np.ndarray):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != grid_x.shape + grid_x.shape:
            raise GridMismatch("kernel values must have shape x-grid + x-grid")
        self.grid_x = grid_x
        self.values = values

    @staticmethod
    def zeros(grid_x: Grid) -> "KernelOp":
        return KernelOp(grid_x, np.zeros(grid_x.shape + grid_x.shape, dtype=complex))

    @staticmethod
    def rank_one(phi: Field, psi: Field) -> "KernelOp":
        """phi (x) conj(psi): the operator f -> <f, psi> phi."""
        n = phi.grid.ndim
        vals = phi.values.reshape(phi.grid.shape + (1,) * n) * np.conj(psi.values)
        return KernelOp(phi.grid, vals)

    @property
    def _npts(self):
        return int(np.prod(self.grid_x.shape))

    def matrix(self) -> np.ndarray:
        return self.values.reshape(self._npts, self._npts)

    def weighted_matrix(self) -> np.ndarray:
        return self.matrix() * self.grid_x.cell_weight()

    def apply(self, phi: Field) -> Field:
        if phi.grid.shape != self.grid_x.shape:
            raise GridMismatch("kernel and vector grids differ")
        out = self.matrix() @ phi.values.ravel() * self.grid_x.cell_weight()
        return Field(phi.grid, out.reshape(self.grid_x.shape))

    def compose(self, other: "KernelOp") -> "KernelOp":
        """Operator product: (self o other)(x, y) = int self(x, z) other(z, y) dz."""
        vals = self.matrix() @ other.matrix() * self.grid_x.cell_weight()
        return KernelOp(self.grid_x, vals.reshape(self.values.shape))

    def hs_norm(self) -> float:
        w = self.grid_x.cell_weight()
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * w * w))

    def hs_inner(self, other: "KernelOp") -> complex:
        """tr(self other^*) = int K1(x, y) conj(K2(x, y)) dx dy."""
        w = self.grid_x.cell_weight()
        return complex(np.vdot(other.values, self.values) * w * w)

    def trace(self) -> complex:
        d = np.einsum("ii->i", self.matrix())
        return complex(d.sum() * self.grid_x.cell_weight())

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.weighted_matrix(), compute_uv=False)

    def schatten(self, r: float) -> float:
        s = self.singular_values()
        if np.isinf(r):
            return float(s[0]) if s.size else 0.0
        return float(np.sum(s ** r) ** (1.0 / r))

    def adjoint(self) -> "KernelOp":
        n = self.grid_x.ndim
        perm = tuple(range(n, 2 * n)) + tuple(range(n))
        return KernelOp(self.grid_x, np.conj(self.values.transpose(perm)))

    def __add__(self, other):
        return KernelOp(self.grid_x, self.values + other.values)

    def __sub__(self, other):
        return KernelOp(self.grid_x, self.values - other.values)

    def __mul__(self, c):
        return KernelOp(self.grid_x, self.values * c)

    __rmul__ = __mul__


# ----------------------------------------------------------------------
# the representation
# ----------------------------------------------------------------------
def apply_rep(k, a: GroupElement, phi: Field, family: OrthFamily, check_support: bool = True) -> Field:
    """pi_k(a) phi on the sample grid of phi.

    On-lattice shifts are exact index shifts with zero fill; off-lattice
    shifts use the band-limited interpolant, which preserves the discrete
    norm to spectral accuracy.
    """
    k = as_freq(k, family.m)
    n = family.n
    if phi.grid.ndim != n:
        raise DimensionMismatch("state grid dimension != family.n")
    Bk = family.assemble(k.vec)
    vals = phi.values
    total = float(np.sum(np.abs(vals) ** 2))
    for i in range(n):
        ax = phi.grid.axes[i]
        s = a.p[i] / ax.spacing
        si = int(np.rint(s))
        if abs(s - si) <= 1e-9:
            before = float(np.sum(np.abs(vals) ** 2))
            # value of phi at x + p: out[ix] = in[ix + si]
            vals = _lattice_shift(vals, i, -si)
            if check_support and total > 0.0:
                dropped = before - float(np.sum(np.abs(vals) ** 2))
                if dropped > 1e-8 * total:
                    raise SupportOverflow(
                        "shift dropped significant mass off the grid boundary"
                    )
        else:
            if check_support and total > 0.0:
                _check_wrap_mass(vals, i, ax, a.p[i], total)
            vals = _fractional_shift_axis(vals, i, ax, a.p[i])
    mesh = phi.grid.meshgrid()
    u = a.q @ Bk  # row vector: q.B_k x = u.x
    arg = np.zeros(phi.grid.shape)
    for r in range(n):
        arg = arg + u[r] * (mesh[r] + 0.5 * a.p[r])
    phase = np.exp(1j * arg) * np.exp(1j * float(np.dot(k.vec, a.t)))
    return Field(phi.grid, vals * phase)


def _fractional_shift_axis(vals, axis, ax, shift):
    nax = ax.n
    freqs = 2.0 * np.pi * np.fft.fftfreq(nax, d=ax.spacing)
    sh = [1] * vals.ndim
    sh[axis] = nax
    phase = np.exp(1j * freqs * shift).reshape(sh)  # e^{i omega s}: sample at x + s
    return np.fft.ifft(np.fft.fft(vals, axis=axis) * phase, axis=axis)


def _check_wrap_mass(vals, axis, ax, shift, total):
    """Fractional shifts interpolate the periodic extension; mass inside the
    wrap window (plus a 2-sample shell) would alias across the boundary."""
    cells = min(int(np.ceil(abs(shift) / ax.spacing)) + 2, ax.n)
    sl = [slice(None)] * vals.ndim
    shell = 0.0
    for edge in (slice(0, cells), slice(-cells, None)):
        sl[axis] = edge
        shell += float(np.sum(np.abs(vals[tuple(sl)]) ** 2))
    if shell > 1e-8 * total:
        raise SupportOverflow(
            "shift pushed significant mass within reach of the grid boundary"
        )


def matrix_element(k, a: GroupElement, phi: Field, psi: Field, family: OrthFamily) -> complex:
    """<phi, pi_k(a) psi> by quadrature."""
    return phi.inner(apply_rep(k, a, psi, family, check_support=False))


def rep_matrix_elements(k, phi: Field, psi: Field, family: OrthFamily, grid_q: Grid, grid_p: Grid) -> np.ndarray:
    """<pi_k(q, p) phi, psi> on a product (q, p) lattice, vectorized.

    The p nodes must lie on the lattice of phi's grid.  Returns an array of
    shape grid_q.shape + grid_p.shape.
    """
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    w = phi.grid.cell_weight()
    pnodes = [grid_p.nodes(i) for i in range(n)]
    shifted = lattice_shift_table(phi, pnodes)  # axes: x..., p...
    core = shifted * np.conj(psi.values).reshape(psi.values.shape + (1,) * n)

    qnodes = [grid_q.nodes(i) for i in range(n)]
    qmesh = np.meshgrid(*qnodes, indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh])  # (n, Nq)
    u = Bk.T @ qstack  # (n, Nq): B_k^t q
    xmesh = np.meshgrid(*[phi.grid.nodes(i) for i in range(n)], indexing="ij")
    xstack = np.stack([xm.ravel() for xm in xmesh])  # (n, Nx)
    phase = np.exp(1j * (u.T @ xstack))  # (Nq, Nx)
    flat = core.reshape(xstack.shape[1], -1)  # (Nx, Np)
    res = (phase @ flat) * w  # (Nq, Np)
    pmesh = np.meshgrid(*pnodes, indexing="ij")
    pstack = np.stack([pm.ravel() for pm in pmesh])  # (n, Np)
    half = np.exp(0.5j * (u.T @ pstack))  # (Nq, Np)
    res = res * half
    return res.reshape(grid_q.shape + grid_p.shape)


def lattice_shift_table(phi: Field, pnodes) -> np.ndarray:
    """phi(x + p) for p node lists on the lattice of phi's grid (zero fill).

    Output axes: phi's axes followed by one axis per p node list.
    """
    n = phi.grid.ndim
    vals = phi.values
    # process from the last axis backwards so earlier axis indices stay valid
    for i in range(n):
        ax = phi.grid.axes[i]
        steps = np.asarray(pnodes[i]) / ax.spacing
        rounded = np.rint(steps)
        if np.max(np.abs(steps - rounded)) > 1e-9:
            raise GridMismatch(f"p nodes of axis {i} are off the state lattice")
        shifts = rounded.astype(int)
        nax = ax.n
        idx = np.arange(nax)[:, None] + shifts[None, :]
        valid = (idx >= 0) & (idx < nax)
        idxc = np.clip(idx, 0, nax - 1)
        moved = np.moveaxis(vals, i, 0)  # (x_i, rest...)
        gathered = moved[idxc] * valid[(...,) + (None,) * (moved.ndim - 1)]
        # axes now (x_i, p_i, rest...); return x_i home, park p_i at the end
        gathered = np.moveaxis(gathered, 1, -1)
        vals = np.moveaxis(gathered, 0, i)
    return vals


def admissibility_constant(k, phi: Field, family: OrthFamily, grid_q: Grid = None, grid_p: Grid = None) -> float:
    """Numerical int_G |<phi, pi_k phi>|^2 dq dp dt divided by ||phi||^4.

    The t integral contributes an exact (2 pi)^m factor because the modulus
    is t independent.  Converges to |det B_k|^{-1} (2 pi)^{m+n} when the
    matrix-element tails are inside the truncation box.
    """
    k = as_freq(k, family.m)
    if grid_q is None:
        grid_q = phi.grid
    if grid_p is None:
        grid_p = phi.grid
    me = rep_matrix_elements(k, phi, phi, family, grid_q, grid_p)
    dens = np.abs(me) ** 2
    w = grid_q.cell_weight() * grid_p.cell_weight()
    total = float(dens.sum()) * w
    edge = 0.0
    for axis in range(dens.ndim):
        sl = [slice(None)] * dens.ndim
        for cells in (0, -1):
            sl[axis] = cells
            edge += float(np.sum(dens[tuple(sl)])) * w
    if total > 0 and edge > 1e-8 * total:
        raise TruncationTooSmall("integrand tail exceeds 1e-8 of the integral")
    total *= (2.0 * np.pi) ** family.m
    nrm = phi.norm()
    return total / nrm ** 4


# ----------------------------------------------------------------------
# group Fourier transform
# ----------------------------------------------------------------------
def gft_from_coeff(fk: Field, k, family: OrthFamily, grid_x: Grid) -> KernelOp:
    """Kernel of int fk(q, p) pi_k(q, p) dq dp from the torus coefficient fk
    on a (q, p) grid.

    The x grid spacing must match the p axes of fk so that y - x lands on
    the p lattice exactly; the first-slot transform is evaluated at the
    coordinate-changed frequencies -B_k (x + y)/2 by the semidiscrete sum.
    """
    k = as_freq(k, family.m)
    n = family.n
    if fk.grid.ndim != 2 * n:
        raise GridMismatch("coefficient field must live on a (q, p) grid")
    if grid_x.ndim != n:
        raise GridMismatch("kernel grid must have n axes")
    if np.max(np.abs(fk.values)) == 0.0:
        return KernelOp.zeros(grid_x)
    Bk = family.assemble(k.vec)
    xaxes = [grid_x.axes[i] for i in range(n)]
    paxes = [fk.grid.axes[n + i] for i in range(n)]
    for i in range(n):
        if abs(xaxes[i].spacing - paxes[i].spacing) > 1e-12:
            raise GridMismatch("kernel grid spacing must match the p-axis spacing")

    # sum lattice s = x + y per axis: 2N-1 values, s = 2*nodes[0] + u*dx
    svals = [2.0 * ax.nodes[0] + ax.spacing * np.arange(2 * ax.n - 1) for ax in xaxes]
    smesh = np.meshgrid(*svals, indexing="ij")
    sstack = np.stack([sm.ravel() for sm in smesh])  # (n, Ns)
    targets = -0.5 * (Bk @ sstack)  # (n, Ns)

    for i in range(n):
        nyq = np.pi / fk.grid.axes[i].spacing
        if np.max(np.abs(targets[i])) > nyq * (1 + 1e-12):
            raise InterpolationOverflow(
                "coordinate-changed frequency exits the resolvable band; "
                "refine the (q, p) grid or reduce ||k||"
            )

    # (F_1 fk)(xi, p) = (2 pi)^(-n/2) sum_q fk(q, p) e^{-i q.xi} prod dq
    wq = 1.0
    for i in range(n):
        wq *= fk.grid.axes[i].weight
    qmesh = np.meshgrid(*[fk.grid.nodes(i) for i in range(n)], indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh])  # (n, Nq)
    E = np.exp(-1j * (targets.T @ qstack))  # (Ns, Nq)
    flat = fk.values.reshape(qstack.shape[1], -1)  # (Nq, Np)
    F1 = (E @ flat) * (wq * (2.0 * np.pi) ** (-n / 2.0))
    F1 = F1.reshape(tuple(len(s) for s in svals) + tuple(ax.n for ax in paxes))

    # gather N(x, y) = (2 pi)^(n/2) F1[x + y, y - x]
    nx = [ax.n for ax in xaxes]
    idxmesh = np.meshgrid(*[np.arange(v) for v in nx + nx], indexing="ij")
    s_idx, p_idx = [], []
    mask = np.ones(tuple(nx + nx), dtype=bool)
    for i in range(n):
        ix, iy = idxmesh[i], idxmesh[n + i]
        s_idx.append(ix + iy)
        pax = paxes[i]
        origin = int(np.rint(-pax.nodes[0] / pax.spacing))
        pi_ = iy - ix + origin
        mask &= (pi_ >= 0) & (pi_ < pax.n)
        p_idx.append(np.clip(pi_, 0, pax.n - 1))
    kernel = F1[tuple(s_idx) + tuple(p_idx)] * mask
    kernel = kernel * (2.0 * np.pi) ** (n / 2.0)
    return KernelOp(grid_x, kernel)


def gft(f: Field, k, family: OrthFamily, grid_x: Grid) -> KernelOp:
    """Group Fourier transform Ff(k) of a field on G as a kernel operator."""
    k = as_freq(k, family.m)
    fk = f.torus_coeff(k.k)
    return gft_from_coeff(fk, k, family, grid_x)


def trace_pi_star(kernel: KernelOp, k, family: OrthFamily, grid_q: Grid, grid_p: Grid, tnodes) -> np.ndarray:
    """tr(pi_k(q, p, t)^* K) on a (q, p, t) product lattice.

    Uses tr(pi_k(a)^* K) = e^{-i k.t} int e^{-i q.B_k(x - p/2)} K(x - p, x) dx,
    with x - p evaluated by lattice shifts (the p axes must share the kernel
    spacing).  Returns an array of shape grid_q.shape + grid_p.shape + (nt...,).
    """
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    gx = kernel.grid_x
    w = gx.cell_weight()
    pnodes = [grid_p.nodes(i) for i in range(n)]
    # D(x, p) = K(x - p, x): shift the first block by -p
    nxs = gx.shape
    vals = kernel.values
    # diagonal in the second block: D0(x) tables per p-shift
    # build K(x - p, x) via index gather on each first-block axis
    for i in range(n):
        ax = gx.axes[i]
        steps = np.asarray(pnodes[i]) / ax.spacing
        rounded = np.rint(steps)
        if np.max(np.abs(steps - rounded)) > 1e-9:
            raise GridMismatch("p nodes must lie on the kernel lattice")
        shifts = rounded.astype(int)
        idx = np.arange(ax.n)[:, None] - shifts[None, :]
        valid = (idx >= 0) & (idx < ax.n)
        idxc = np.clip(idx, 0, ax.n - 1)
        moved = np.moveaxis(vals, i, 0)
        gathered = moved[idxc] * valid[(...,) + (None,) * (moved.ndim - 1)]
        gathered = np.moveaxis(gathered, 1, -1)  # park p_i at the end
        vals = np.moveaxis(gathered, 0, i)
    # vals axes: first block (shifted), second block, p...
    # take the diagonal over (first block, second block)
    npts = int(np.prod(nxs))
    pshape = tuple(len(pn) for pn in pnodes)
    flat = vals.reshape((npts, npts) + pshape)
    diag = flat[np.arange(npts), np.arange(npts)]  # (Nx, p...)
    # phase e^{-i q.B_k (x - p/2)} = e^{-i u.x} e^{+i u.p/2}, u = B_k^t q
    qmesh = np.meshgrid(*[grid_q.nodes(i) for i in range(n)], indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh])
    u = Bk.T @ qstack  # (n, Nq)
    xmesh = np.meshgrid(*[gx.nodes(i) for i in range(n)], indexing="ij")
    xstack = np.stack([xm.ravel() for xm in xmesh])
    Eq = np.exp(-1j * (u.T @ xstack))  # (Nq, Nx)
    res = Eq @ diag.reshape(npts, -1) * w  # (Nq, Np)
    pmesh = np.meshgrid(*pnodes, indexing="ij")
    pstack = np.stack([pm.ravel() for pm in pmesh])
    half = np.exp(0.5j * (u.T @ pstack))  # (Nq, Np)
    res = res * half
    res = res.reshape(grid_q.shape + pshape)
    # torus phase e^{-i k.t}
    tnodes = [np.atleast_1d(t) for t in tnodes]
    for j, tn in enumerate(tnodes):
        ph = np.exp(-1j * k.vec[j] * tn)
        res = res[..., None] * ph.reshape((1,) * res.ndim + (-1,))
        res = np.moveaxis(res, -1, len(grid_q.shape) + len(pshape) + j)
    return res


def plancherel_gap(f: Field, ks, family: OrthFamily, grid_x: Grid) -> dict:
    """Both sides of the Plancherel identity over the given k range.

    lhs = sum_k ||Ff(k)||_HS^2 (2 pi)^(-n) ||k||^n, rhs = ||f - f^0||^2_mu.
    The k range must cover the t spectrum of f for the identity to close.
    """
    n = family.n
    lhs = 0.0
    per_k = {}
    for k in ks:
        kf = as_freq(k, family.m)
        kern = gft(f, kf, family, grid_x)
        val = kern.hs_norm() ** 2 * alpha_weight(kf, n)
        per_k[kf.k] = val
        lhs += val
    f0 = f.torus_coeff((0,) * family.m)
    # || f - f^0 ||^2 in L^2(G, mu)
    taxes = [i for i, ax in enumerate(f.grid.axes) if ax.kind == TORUS]
    tshape = [f.grid.axes[i].n for i in taxes]
    f0b = f0.values.reshape(f0.values.shape + (1,) * len(taxes))
    diff = f.values - f0b
    w = f.grid.cell_weight() * (2.0 * np.pi) ** (-family.m)
    rhs = float(np.sum(np.abs(diff) ** 2) * w)
    rel = abs(lhs - rhs) / max(abs(rhs), 1e-300)
    return {"lhs": lhs, "rhs": rhs, "rel_err": rel, "per_k": per_k}


def invert(table: dict, f0: Field, family: OrthFamily, grid_g: Grid) -> Field:
    """Reconstruct f on the G grid from its Fourier kernels and f^0:

        f = sum_k tr(pi_k(q, p, t)^* Ff(k)) (2 pi)^(-n) ||k||^n + f^0.
    """
    n, m = family.n, family.m
    qaxes = Grid(grid_g.axes[:n])
    paxes = Grid(grid_g.axes[n : 2 * n])
    tnodes = [grid_g.axes[2 * n + j].nodes for j in range(m)]
    out = np.zeros(grid_g.shape, dtype=complex)
    for k, kern in table.items():
        kf = as_freq(k, m)
        tr = trace_pi_star(kern, kf, family, qaxes, paxes, tnodes)
        out = out + tr * alpha_weight(kf, n)
    out = out + f0.values.reshape(f0.values.shape + (1,) * m)
    return Field(grid_g, out)


# ----------------------------------------------------------------------
# serialization of Fourier tables
# ----------------------------------------------------------------------
def save_table(table: dict, directory) -> None:
    """One kernel file per k plus a JSON manifest {k, ||k||, grid}."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = []
    try:
        for i, (k, kern) in enumerate(sorted(table.items())):
            kf = as_freq(k)
            name = f"kernel_{i:04d}.bin"
            raw = np.empty(kern.values.size * 2, dtype="<f8")
            raw[0::2] = kern.values.real.ravel()
            raw[1::2] = kern.values.imag.ravel()
            (directory / name).write_bytes(raw.tobytes())
            manifest.append(
                {
                    "k": list(kf.k),
                    "norm": kf.norm,
                    "file": name,
                    "grid": [
                        {"kind": ax.kind, "n": ax.n, "half_extent": ax.half_extent}
                        for ax in kern.grid_x.axes
                    ],
                }
            )
        (directory / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def load_table(directory) -> dict:
    directory = Path(directory)
    try:
        manifest = json.loads((directory / "manifest.json").read_text())
        table = {}
        for entry in manifest:
            axes = tuple(Axis(a["kind"], a["n"], a.get("half_extent", 0.0)) for a in entry["grid"])
            g = Grid(axes)
            raw = np.frombuffer((directory / entry["file"]).read_bytes(), dtype="<f8")
            vals = (raw[0::2] + 1j * raw[1::2]).reshape(g.shape + g.shape)
            table[tuple(entry["k"])] = KernelOp(g, vals)
        return table
    except (OSError, KeyError, ValueError) as exc:
        raise IoFailure(str(exc)) from exc
