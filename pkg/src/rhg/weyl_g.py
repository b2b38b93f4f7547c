"""Operator-valued Wigner transform on G, the Weyl transform with
operator-valued symbol, Schatten-norm checks and the unboundedness
demonstrator.

The Wigner transform of f, g on G is the operator field

    V(f, g)(x, k) = F[ y -> f(y) g(y^{-1} x) ](k),      x in G,

computed per grid point from the torus-mode expansion

    h_x^k(q', p') = sum_j f^{k+j}(q', p') g^j(Q-q', P-p')
                    e^{-i j.T} e^{-(i/2) j.beta},
    beta_j = q'.B_j P - Q.B_j p',      x = (Q, P, T),

followed by the group Fourier transform of the coefficient h_x^k.  This is
exact for fields band-limited in t.

The Weyl transform W_sigma acts on L^2(G, mu) through the kernel

    K(x; x') = sum_k tr[ sigma^*(x' x, k) pi_k(x') ] (2 pi)^(-n) ||k||^n,

and the weighted-matrix spectral calculus D^{1/2} K D^{1/2} (D the mu
weights) supplies Schatten norms.  The identity ||W_sigma||_{S2}^2 =
||sigma||_{2, mu x alpha}^2 is exact; the trace-class side is explored via
the diagonal integral int |K(x, x)| dmu, which the change of variables
(q, p, t) -> (2q, 2p, 2t) bounds by 2^(-2n) ||sigma||_{1, mu x alpha}
(the torus direction contributes no Jacobian factor because t -> 2t is
measure preserving on T^m).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import OrthFamily, _lattice_shift
from .errors import BadAlpha, BadExponent, BadRange, GridMismatch, KernelTooLarge, ZeroC
from .fields import LINE, TORUS, Field, Grid
from .rep_fourier import KernelOp, alpha_weight, as_freq, gft, gft_from_coeff, trace_pi_star

_DESK_POINTS = 4096


# ----------------------------------------------------------------------
# torus-mode bookkeeping
# ----------------------------------------------------------------------
def _split_g_grid(grid_g: Grid, n: int, m: int):
    if grid_g.ndim != 2 * n + m:
        raise GridMismatch("G grid must have 2n line axes plus m torus axes")
    for ax in grid_g.axes[: 2 * n]:
        if ax.kind != LINE:
            raise GridMismatch("first 2n axes of a G grid must be line axes")
    for ax in grid_g.axes[2 * n :]:
        if ax.kind != TORUS:
            raise GridMismatch("last m axes of a G grid must be torus axes")
    gq = Grid(grid_g.axes[:n])
    gp = Grid(grid_g.axes[n : 2 * n])
    return gq, gp


def field_modes(f: Field, n: int, m: int, tol: float = 1e-14) -> dict:
    """Nonzero torus coefficients of a field on G as {j tuple: (q, p) array}."""
    freqs, coeffs = f.torus_modes()
    peak = np.max(np.abs(coeffs)) if coeffs.size else 0.0
    out = {}
    for idx in np.ndindex(*[len(fr) for fr in freqs]):
        j = tuple(int(freqs[a][idx[a]]) for a in range(m))
        block = coeffs[(...,) + idx]
        if peak == 0.0 or np.max(np.abs(block)) > tol * peak:
            out[j] = np.ascontiguousarray(block)
    return out


def _mode_sum_at(modes: dict, tval: np.ndarray):
    """sum_j e^{-i j.t} modes[j] at one t value."""
    acc = None
    for j, block in modes.items():
        ph = np.exp(-1j * float(np.dot(j, tval)))
        acc = block * ph if acc is None else acc + block * ph
    return acc


# ----------------------------------------------------------------------
# the Wigner transform, streamed per point
# ----------------------------------------------------------------------
def _shift_block(block: np.ndarray, index_shift, n: int) -> np.ndarray:
    """values[idx - shift] with zero fill on the first 2n axes (lattice
    translate of a (q, p) coefficient block by a grid point)."""
    out = block
    for i in range(2 * n):
        out = _lattice_shift(out, i, index_shift[i])
    return out


def _reflect_block(block: np.ndarray, n: int) -> np.ndarray:
    """values at the negated (q, p) nodes, zero filled at the asymmetric
    edge node (-L has no +L partner on the lattice)."""
    out = block
    for i in range(2 * n):
        moved = np.moveaxis(out, i, 0)
        ref = np.zeros_like(moved)
        ref[1:] = moved[:0:-1]
        out = np.moveaxis(ref, 0, i)
    return out


def _point_of(grid_g: Grid, n: int, m: int, x_idx: tuple):
    Q = np.array([grid_g.axes[i].nodes[x_idx[i]] for i in range(n)])
    P = np.array([grid_g.axes[n + i].nodes[x_idx[n + i]] for i in range(n)])
    T = np.array([grid_g.axes[2 * n + j].nodes[x_idx[2 * n + j]] for j in range(m)])
    return Q, P, T


def wigner_coeff_at(f_modes: dict, g_modes: dict, Q, P, T, k, grid_g: Grid, family: OrthFamily) -> np.ndarray:
    """h_x^k on the (q', p') grid for the G point x = (Q, P, T).

    The (Q, P) components must lie on the (q', p') lattice (the point need
    not lie inside the coefficient box)."""
    n, m = family.n, family.m
    kf = as_freq(k, m)
    gq, gp = _split_g_grid(grid_g, n, m)
    qnodes = [gq.nodes(i) for i in range(n)]
    pnodes = [gp.nodes(i) for i in range(n)]
    Q = np.atleast_1d(np.asarray(Q, dtype=float))
    P = np.atleast_1d(np.asarray(P, dtype=float))
    T = np.atleast_1d(np.asarray(T, dtype=float))
    shift = []
    for i in range(n):
        s = Q[i] / gq.axes[i].spacing
        if abs(s - np.rint(s)) > 1e-9:
            raise GridMismatch("x point is off the coefficient lattice")
        shift.append(int(np.rint(s)))
    for i in range(n):
        s = P[i] / gp.axes[i].spacing
        if abs(s - np.rint(s)) > 1e-9:
            raise GridMismatch("x point is off the coefficient lattice")
        shift.append(int(np.rint(s)))

    # beta_j(q', p') = q'.B_j P - Q.B_j p' on the (q', p') mesh
    qmesh = np.meshgrid(*qnodes, *pnodes, indexing="ij")
    beta = []
    for j in range(m):
        Bj = family.B[j]
        term = sum(qmesh[i] * (Bj @ P)[i] for i in range(n)) - sum(
            (Q @ Bj)[i] * qmesh[n + i] for i in range(n)
        )
        beta.append(term)

    acc = np.zeros(gq.shape + gp.shape, dtype=complex)
    for j, gblock in g_modes.items():
        kj = tuple(kf.k[a] + j[a] for a in range(m))
        fblock = f_modes.get(kj)
        if fblock is None:
            continue
        # g^j evaluated at (Q - q', P - p'): reflect, then translate by (Q, P)
        gsh = _shift_block(_reflect_block(gblock, n), shift, n)
        phase = np.exp(-1j * float(np.dot(j, T)) - 0.5j * sum(j[a] * beta[a] for a in range(m)))
        acc = acc + fblock * gsh * phase
    return acc


def wigner_point(f_modes: dict, g_modes: dict, Q, P, T, k, grid_g: Grid, family: OrthFamily, grid_x: Grid) -> KernelOp:
    """V(f, g)(x, k) as a kernel operator for one G point x = (Q, P, T)."""
    h = wigner_coeff_at(f_modes, g_modes, Q, P, T, k, grid_g, family)
    n, m = family.n, family.m
    gq, gp = _split_g_grid(grid_g, n, m)
    coeff = Field(Grid(gq.axes + gp.axes), h)
    return gft_from_coeff(coeff, k, family, grid_x)


@dataclass
class OperatorSymbolG:
    """Operator-valued symbol on G x Z^{m*}: one kernel per (grid point, k).

    Stored over torus modes so the symbol can be evaluated exactly at the
    off-lattice t values produced by group products: values has axes
    (q..., p..., mode, kslot, z..., z'...) and mode_list holds the integer
    mode vectors of the t expansion sigma = sum_nu e^{-i nu.t} sigma_nu.
    """

    grid_g: Grid
    grid_x: Grid
    kslots: tuple
    mode_list: tuple
    values: np.ndarray

    @property
    def n(self):
        return self.grid_x.ndim

    @property
    def m(self):
        return self.grid_g.ndim - 2 * self.n

    @staticmethod
    def from_separable(s: Field, kernels: dict, grid_x: Grid, family: OrthFamily) -> "OperatorSymbolG":
        """sigma(x, k) = s(x) T_k for a scalar field s on G."""
        n, m = family.n, family.m
        smodes = field_modes(s, n, m)
        norm_kernels = {as_freq(k, m).k: T for k, T in kernels.items()}
        kslots = tuple(as_freq(k, m) for k in norm_kernels)
        mode_list = tuple(sorted(smodes))
        gq, gp = _split_g_grid(s.grid, n, m)
        shape = gq.shape + gp.shape + (len(mode_list), len(kslots)) + grid_x.shape + grid_x.shape
        vals = np.zeros(shape, dtype=complex)
        for a, j in enumerate(mode_list):
            block = smodes[j][(...,) + (None,) * (2 * n)]
            for b, kf in enumerate(kslots):
                vals[(...,) + (a, b) + (slice(None),) * (2 * n)] = block * norm_kernels[kf.k].values
        return OperatorSymbolG(s.grid, grid_x, kslots, mode_list, vals)

    def at_nodes(self) -> np.ndarray:
        """Kernels at the t lattice: axes (q..., p..., t..., kslot, z..., z'...)."""
        n, m = self.n, self.m
        taxes = [self.grid_g.axes[2 * n + j] for j in range(m)]
        tmesh = np.meshgrid(*[ax.nodes for ax in taxes], indexing="ij")
        tflat = np.stack([tm.ravel() for tm in tmesh])  # (m, Nt)
        nus = np.array(self.mode_list, dtype=float).reshape(len(self.mode_list), m)
        PH = np.exp(-1j * (nus @ tflat))  # (nmodes, Nt)
        out = np.tensordot(self.values, PH, axes=([2 * n], [0]))
        # axes now (q..., p..., kslot, z..., z'..., Nt); move Nt home
        out = np.moveaxis(out, -1, 2 * n)
        tshape = tuple(ax.n for ax in taxes)
        return out.reshape(self.grid_g.shape[: 2 * n] + tshape + out.shape[2 * n + 1 :])


def wigner_G(f: Field, g: Field, ks, family: OrthFamily, grid_x: Grid) -> OperatorSymbolG:
    """V(f, g) materialized as an OperatorSymbolG over the G grid of f.

    Desk scale only: the G grid may hold at most 4096 points.
    """
    n, m = family.n, family.m
    grid_g = f.grid
    npts = int(np.prod(grid_g.shape))
    if npts > _DESK_POINTS:
        raise KernelTooLarge(f"G grid has {npts} points; limit is {_DESK_POINTS}")
    f_modes = field_modes(f, n, m)
    g_modes = field_modes(g, n, m)
    kslots = tuple(as_freq(k, m) for k in ks)
    nodes_vals = np.zeros(grid_g.shape + (len(kslots),) + grid_x.shape + grid_x.shape, dtype=complex)
    for x_idx in np.ndindex(*grid_g.shape):
        Q, P, T = _point_of(grid_g, n, m, x_idx)
        for b, kf in enumerate(kslots):
            kern = wigner_point(f_modes, g_modes, Q, P, T, kf, grid_g, family, grid_x)
            nodes_vals[x_idx + (b,)] = kern.values
    # convert the t axes to modes
    vals = nodes_vals
    for j in range(m):
        vals = np.fft.ifft(vals, axis=2 * n + j)
    tn = [grid_g.axes[2 * n + j].n for j in range(m)]
    freqs = [np.fft.fftfreq(v, d=1.0 / v).astype(int) for v in tn]
    mode_list = tuple(
        tuple(int(freqs[a][idx[a]]) for a in range(m)) for idx in np.ndindex(*tn)
    )
    newshape = grid_g.shape[: 2 * n] + (int(np.prod(tn)), len(kslots)) + grid_x.shape + grid_x.shape
    vals = vals.reshape(newshape)
    return OperatorSymbolG(grid_g, grid_x, kslots, mode_list, vals)


# ----------------------------------------------------------------------
# Moyal pairing, recovery, inversion
# ----------------------------------------------------------------------
def _mu_weight(grid_g: Grid, m: int) -> float:
    return grid_g.cell_weight() * (2.0 * np.pi) ** (-m)


def moyal_gap(f1: Field, g1: Field, f2: Field, g2: Field, ks, family: OrthFamily, grid_x: Grid) -> dict:
    """Both sides of the Moyal pairing

        <V(f1, g1), V(f2, g2)>_{mu x alpha} = <f1 - f1^0, f2 - f2^0> <g1, g2>.

    The right-hand side holds when g1, g2 are t independent; for t-dependent
    g the exact value is <f1, f2><g1, g2> - sum_j <f1^j, f2^j><g1^j, g2^j>,
    which the tests check separately.
    """
    n, m = family.n, family.m
    grid_g = f1.grid
    f1m = field_modes(f1, n, m)
    g1m = field_modes(g1, n, m)
    f2m = field_modes(f2, n, m)
    g2m = field_modes(g2, n, m)
    wmu = _mu_weight(grid_g, m)
    lhs = 0.0 + 0.0j
    for x_idx in np.ndindex(*grid_g.shape):
        Q, P, T = _point_of(grid_g, n, m, x_idx)
        for k in ks:
            kf = as_freq(k, m)
            V1 = wigner_point(f1m, g1m, Q, P, T, kf, grid_g, family, grid_x)
            V2 = wigner_point(f2m, g2m, Q, P, T, kf, grid_g, family, grid_x)
            lhs += V1.hs_inner(V2) * alpha_weight(kf, n)
    lhs *= wmu

    def minus0(f):
        f0 = f.torus_coeff((0,) * m)
        return f.values - f0.values.reshape(f0.values.shape + (1,) * m)

    d1 = minus0(f1)
    ip_f = np.vdot(minus0(f2), d1) * wmu
    ip_g = np.vdot(g2.values, g1.values) * wmu
    rhs = complex(ip_f * ip_g)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return {"lhs": complex(lhs), "rhs": rhs, "rel_err": float(abs(lhs - rhs) / scale)}


def wigner_integral(f: Field, g: Field, ks, family: OrthFamily, grid_x: Grid, integration_grid: Grid = None) -> dict:
    """int_G V(f, g)(x, k) dmu(x) per k, streamed over an integration grid.

    The integration grid defaults to f's grid but should extend past the
    group product of the supports of f and g (same lattice spacing), since
    V(f, g)(., k) spreads over that product set."""
    n, m = family.n, family.m
    grid_g = f.grid
    ig = integration_grid if integration_grid is not None else grid_g
    f_modes = field_modes(f, n, m)
    g_modes = field_modes(g, n, m)
    wmu = _mu_weight(ig, m)
    out = {}
    for k in ks:
        kf = as_freq(k, m)
        acc = np.zeros(grid_x.shape + grid_x.shape, dtype=complex)
        for x_idx in np.ndindex(*ig.shape):
            Q, P, T = _point_of(ig, n, m, x_idx)
            acc += wigner_point(f_modes, g_modes, Q, P, T, kf, grid_g, family, grid_x).values
        out[kf.k] = KernelOp(grid_x, acc * wmu)
    return out


def ft_recovery_gap(f: Field, g: Field, ks, family: OrthFamily, grid_x: Grid, integration_grid: Grid = None) -> dict:
    """Relative HS gap between int_G V(f, g) dmu / C and the group Fourier
    transform of f, with C = int_G g dmu (must be nonzero)."""
    C = g.integrate("mu")
    if abs(C) < 1e-9 * max(g.norm("mu"), 1e-300):
        raise ZeroC("the recovery constant int g dmu vanishes")
    ints = wigner_integral(f, g, ks, family, grid_x, integration_grid)
    worst = 0.0
    per_k = {}
    for k in ks:
        kf = as_freq(k, family.m)
        lhs = ints[kf.k] * (1.0 / C)
        rhs = gft(f, kf, family, grid_x)
        num = (lhs - rhs).hs_norm()
        den = max(rhs.hs_norm(), 1e-300)
        per_k[kf.k] = num / den
        worst = max(worst, num / den)
    return {"per_k": per_k, "max_rel_err": worst, "C": complex(C)}


def wigner_inversion(f: Field, g: Field, ks, family: OrthFamily, grid_x: Grid, integration_grid: Grid = None) -> dict:
    """Reconstruct f - f^0 from the mu integral of V(f, g):

        (f - f^0)(x) = C^{-1} sum_k tr[pi_k^*(x) int V(f,g) dmu] alpha(k).
    """
    n, m = family.n, family.m
    C = g.integrate("mu")
    if abs(C) < 1e-9 * max(g.norm("mu"), 1e-300):
        raise ZeroC("the recovery constant int g dmu vanishes")
    grid_g = f.grid
    ints = wigner_integral(f, g, ks, family, grid_x, integration_grid)
    gq, gp = _split_g_grid(grid_g, n, m)
    tnodes = [grid_g.axes[2 * n + j].nodes for j in range(m)]
    rec = np.zeros(grid_g.shape, dtype=complex)
    for k in ks:
        kf = as_freq(k, m)
        tr = trace_pi_star(ints[kf.k], kf, family, gq, gp, tnodes)
        rec = rec + tr * alpha_weight(kf, n)
    rec /= C
    f0 = f.torus_coeff((0,) * m)
    ref = f.values - f0.values.reshape(f0.values.shape + (1,) * m)
    num = np.sqrt(np.sum(np.abs(rec - ref) ** 2))
    den = np.sqrt(np.sum(np.abs(ref) ** 2))
    return {"rel_err": float(num / max(den, 1e-300)), "reconstruction": Field(grid_g, rec)}


# ----------------------------------------------------------------------
# mixed norms
# ----------------------------------------------------------------------
def mixed_norm(sym: OperatorSymbolG, r: float) -> float:
    """|| sigma ||_{r, mu x alpha}: the L^r norm over G x Z^{m*} of the
    pointwise S_r norms, with alpha(k) = (2 pi)^(-n) ||k||^n."""
    if not (r >= 1):
        raise BadExponent("r must satisfy 1 <= r <= inf")
    n, m = sym.n, sym.m
    vals = sym.at_nodes()
    wmu = _mu_weight(sym.grid_g, m)
    wk = sym.grid_x.cell_weight()
    nx = int(np.prod(sym.grid_x.shape))
    lead = vals.shape[: 2 * n + m + 1]
    mats = vals.reshape((-1, nx, nx)) * wk
    svals = np.linalg.svd(mats, compute_uv=False)
    if np.isinf(r):
        return float(np.max(svals)) if svals.size else 0.0
    alphas = np.array([alpha_weight(kf, n) for kf in sym.kslots])
    srad = np.sum(svals ** r, axis=1).reshape(lead)
    srad = srad * alphas.reshape((1,) * (2 * n + m) + (-1,))
    return float((np.sum(srad) * wmu) ** (1.0 / r))


# ----------------------------------------------------------------------
# the Weyl transform kernel on G x G
# ----------------------------------------------------------------------
def weyl_G_kernel(sym: OperatorSymbolG, family: OrthFamily):
    """Dense kernel K(x; x') of W_sigma on the G grid of the symbol:

        K(x; x') = sum_k alpha(k) e^{i k.t'}
                   sum_nu e^{i nu.(t + t' + [z', z]/2)}
                   tr[sigma_nu(q+q', p+p', k)^dagger pi_k(q', p', 0)],

    with tr[A^dagger pi_k(q', p')] = sum_z conj(A(z - p', z))
    e^{i q'.B_k(z - p'/2)} w_z.  Returns (matrix, mu_weights): matrix[i, j]
    pairs output point i with integration point j, and
    (W f)(i) = sum_j matrix[i, j] f(j) mu_weights[j].
    """
    n, m = sym.n, sym.m
    grid_g = sym.grid_g
    npts = int(np.prod(grid_g.shape))
    if npts > _DESK_POINTS:
        raise KernelTooLarge(f"G grid has {npts} points; limit is {_DESK_POINTS}")
    gq, gp = _split_g_grid(grid_g, n, m)
    qnodes = [gq.nodes(i) for i in range(n)]
    pnodes = [gp.nodes(i) for i in range(n)]
    tn = [grid_g.axes[2 * n + j].nodes for j in range(m)]
    xg = sym.grid_x
    wz = xg.cell_weight()
    xnodes = [xg.nodes(i) for i in range(n)]
    nmod = len(sym.mode_list)
    nk = len(sym.kslots)
    qp_shape = gq.shape + gp.shape
    nqp = int(np.prod(qp_shape))
    nx = int(np.prod(xg.shape))

    # trace factors TR[y_qp, nu, k, q'_flat, p'_flat]: the z sum for every
    # symbol entry against pi_k(q', p'); the p' dependence is a kernel
    # diagonal shift and the q' dependence a phase contraction over z
    zmesh = np.meshgrid(*xnodes, indexing="ij")
    zstack = np.stack([zm.ravel() for zm in zmesh])  # (n, Nz)
    nq_flat = int(np.prod(gq.shape))
    np_flat = int(np.prod(gp.shape))
    qflat = np.stack([qm.ravel() for qm in np.meshgrid(*qnodes, indexing="ij")])  # (n, Nq')
    TR = np.zeros((nqp, nmod, nk, nq_flat, np_flat), dtype=complex)
    diag_idx = np.arange(nx)
    for pflat, pidx in enumerate(np.ndindex(*gp.shape)):
        pv = np.array([pnodes[i][pidx[i]] for i in range(n)])
        steps = [int(np.rint(pv[i] / xg.axes[i].spacing)) for i in range(n)]
        # A(z - p', z): shift the first kernel block, take the diagonal
        blk = sym.values  # (qp..., nu, k, z..., z'...)
        lead = 2 * n + 2
        for i in range(n):
            blk = _lattice_shift(blk, lead + i, steps[i])
        flat = blk.reshape((nqp, nmod, nk, nx, nx))
        diag = np.conj(flat[..., diag_idx, diag_idx])  # (nqp, nu, k, Nz)
        for b, kf in enumerate(sym.kslots):
            Bk = family.assemble(kf.vec)
            u = Bk.T @ qflat  # (n, Nq')
            ph = np.exp(1j * (zstack - 0.5 * pv[:, None]).T @ u)  # (Nz, Nq')
            TR[:, :, b, :, pflat] = diag[:, :, b, :] @ ph * wz  # (nqp, nu, Nq')

    # assemble columns over x' with lattice gathers over x
    all_qp_origin = [int(np.rint(-qnodes[i][0] / gq.axes[i].spacing)) for i in range(n)] + [
        int(np.rint(-pnodes[i][0] / gp.axes[i].spacing)) for i in range(n)
    ]
    tshape = tuple(grid_g.axes[2 * n + j].n for j in range(m))
    ntp = int(np.prod(tshape))
    K = np.zeros((npts, npts), dtype=complex)
    mesh_qp = np.meshgrid(*qnodes, *pnodes, indexing="ij")
    qx = [mesh_qp[i] for i in range(n)]
    px = [mesh_qp[n + i] for i in range(n)]
    nus = np.array(sym.mode_list, dtype=float).reshape(nmod, m)
    tmesh = np.meshgrid(*tn, indexing="ij")
    tstack = np.stack([tm.ravel() for tm in tmesh])  # (m, Nt)

    for xp_qp in np.ndindex(*qp_shape):
        qp_ = np.array([qnodes[i][xp_qp[i]] for i in range(n)])
        pp_ = np.array([pnodes[i][xp_qp[n + i]] for i in range(n)])
        # bracket [z', z]_j = q.B_j p' - q'.B_j p on the x mesh
        brack = []
        for j in range(m):
            Bj = family.B[j]
            term = sum(qx[i] * (Bj @ pp_)[i] for i in range(n)) - sum(
                (qp_ @ Bj)[i] * px[i] for i in range(n)
            )
            brack.append(term)
        brack = np.stack([b.ravel() for b in brack])  # (m, nqp)

        # TR gathered at y = x + x' (lattice shift over the x block)
        qprime_flat = int(np.ravel_multi_index(xp_qp[:n], gq.shape))
        pprime_flat = int(np.ravel_multi_index(xp_qp[n:], gp.shape))
        tr_qp = TR[:, :, :, qprime_flat, pprime_flat]  # (nqp indexed by y, nu, k)
        tr_qp = tr_qp.reshape(qp_shape + (nmod, nk))
        for i in range(2 * n):
            tr_qp = _lattice_shift(tr_qp, i, -(xp_qp[i] - all_qp_origin[i]))
        tr_qp = tr_qp.reshape(nqp, nmod, nk)

        for tp_idx in np.ndindex(*tshape):
            tp_ = np.array([tn[j][tp_idx[j]] for j in range(m)])
            jflat = np.ravel_multi_index(xp_qp + tp_idx, grid_g.shape)
            # t_y = t + t' + brack/2 for every output (x_qp, t); axes (m, nqp, Nt)
            ty = tstack[:, None, :] + tp_[:, None, None] + 0.5 * brack[:, :, None]
            ph_nu = np.exp(1j * np.einsum("am,mqt->aqt", nus, ty))  # (nu, nqp, Nt)
            col = np.zeros((nqp, ntp), dtype=complex)
            for b, kf in enumerate(sym.kslots):
                wk_ph = alpha_weight(kf, n) * np.exp(1j * float(np.dot(kf.vec, tp_)))
                col += wk_ph * np.einsum("qa,aqt->qt", tr_qp[:, :, b], ph_nu)
            K[:, jflat] = col.reshape(npts)
    weights = np.full(npts, _mu_weight(grid_g, m))
    return K, weights


def schatten_report(K: np.ndarray, weights: np.ndarray) -> dict:
    """Singular values of D^{1/2} K D^{1/2} and the S1/S2 norms."""
    d = np.sqrt(weights)
    M = (d[:, None] * K) * d[None, :]
    s = np.linalg.svd(M, compute_uv=False)
    return {"singular_values": s, "s1": float(np.sum(s)), "s2": float(np.sqrt(np.sum(s ** 2)))}


def diagonal_l1(sym: OperatorSymbolG, family: OrthFamily) -> float:
    """int_G |K(x, x)| dmu: the diagonal integral that the doubling
    substitution bounds by 2^{-2n} ||sigma||_{1, mu x alpha}."""
    n, m = sym.n, sym.m
    grid_g = sym.grid_g
    gq, gp = _split_g_grid(grid_g, n, m)
    qnodes = [gq.nodes(i) for i in range(n)]
    pnodes = [gp.nodes(i) for i in range(n)]
    tn = [grid_g.axes[2 * n + j].nodes for j in range(m)]
    xg = sym.grid_x
    wz = xg.cell_weight()
    xnodes = [xg.nodes(i) for i in range(n)]
    origins = [int(np.rint(-qnodes[i][0] / gq.axes[i].spacing)) for i in range(n)] + [
        int(np.rint(-pnodes[i][0] / gp.axes[i].spacing)) for i in range(n)
    ]
    total = 0.0
    nx = int(np.prod(xg.shape))
    diag_idx = np.arange(nx)
    zmesh = np.meshgrid(*xnodes, indexing="ij")
    for x_idx in np.ndindex(*grid_g.shape):
        qv = np.array([qnodes[i][x_idx[i]] for i in range(n)])
        pv = np.array([pnodes[i][x_idx[n + i]] for i in range(n)])
        tv = np.array([tn[j][x_idx[2 * n + j]] for j in range(m)])
        y_idx = tuple(2 * x_idx[i] - origins[i] for i in range(2 * n))
        if any(not (0 <= y_idx[i] < grid_g.shape[i]) for i in range(2 * n)):
            continue
        val = 0.0 + 0.0j
        for b, kf in enumerate(sym.kslots):
            Bk = family.assemble(kf.vec)
            steps = [int(np.rint(pv[i] / xg.axes[i].spacing)) for i in range(n)]
            blk = sym.values[y_idx + (slice(None), b)]
            for i in range(n):
                blk = _lattice_shift(blk, 1 + i, steps[i])
            flat = blk.reshape(len(sym.mode_list), nx, nx)
            diag = np.conj(flat[:, diag_idx, diag_idx])  # (nu, Nz)
            u = qv @ Bk
            ph = np.exp(1j * sum(u[i] * (zmesh[i].ravel() - 0.5 * pv[i]) for i in range(n)))
            tr_nu = diag @ ph * wz  # (nu,)
            ty = 2.0 * tv
            ph_nu = np.exp(1j * np.array([float(np.dot(nu, ty)) for nu in sym.mode_list]))
            val += alpha_weight(kf, n) * np.exp(1j * float(np.dot(kf.vec, tv))) * np.sum(tr_nu * ph_nu)
        total += abs(val)
    return total * _mu_weight(grid_g, m)


# ----------------------------------------------------------------------
# the unboundedness demonstrator
# ----------------------------------------------------------------------
def cell_averaged_power(nodes: np.ndarray, spacing: float, alpha: float, cut: float = None) -> np.ndarray:
    """Samples of |u|^alpha with the singular cell replaced by its average.

    For the cell [a, b] containing 0 the average is
    (|a|^{alpha+1} + |b|^{alpha+1}) / ((alpha + 1) (b - a)); optionally the
    factor is cut to zero for |u| > cut.
    """
    if alpha <= -0.5:
        raise BadAlpha("alpha must exceed -1/2 for square integrability")
    if alpha == 0:
        vals = np.ones_like(nodes, dtype=float)
    else:
        with np.errstate(divide="ignore"):
            vals = np.abs(nodes, dtype=float) ** alpha
    half = spacing / 2.0
    sing = np.abs(nodes) < half
    if np.any(sing):
        a = nodes[sing] - half
        b = nodes[sing] + half
        avg = (np.abs(a) ** (alpha + 1.0) + np.abs(b) ** (alpha + 1.0)) / ((alpha + 1.0) * spacing)
        vals = vals.copy()
        vals[sing] = avg
    if cut is not None:
        vals = vals * (np.abs(nodes) <= cut)
    return vals


def f_alpha_sample(alpha: float, grid_g: Grid, family: OrthFamily) -> Field:
    """The compactly supported singular profile

        f_alpha = prod |t_i|^alpha prod |q_j|^alpha prod |p_l|^alpha

    on {t in [0, 2 pi]^m, |q_j| <= 1, |p_l| <= 1}, sampled with cell-averaged
    values in the cells meeting the coordinate axes."""
    n, m = family.n, family.m
    if alpha <= -0.5:
        raise BadAlpha("alpha must exceed -1/2")
    gq, gp = _split_g_grid(grid_g, n, m)
    factors = []
    for i in range(n):
        factors.append(cell_averaged_power(gq.nodes(i), gq.axes[i].spacing, alpha, cut=1.0))
    for i in range(n):
        factors.append(cell_averaged_power(gp.nodes(i), gp.axes[i].spacing, alpha, cut=1.0))
    for j in range(m):
        ax = grid_g.axes[2 * n + j]
        h = ax.spacing
        if alpha == 0:
            factors.append(np.ones(ax.n))
            continue
        with np.errstate(divide="ignore"):
            tvals = ax.nodes.astype(float) ** alpha
        # the node t = 0 represents the wrapped cell [2 pi - h/2, 2 pi) u [0, h/2):
        # singular on the right half only
        right = (h / 2.0) ** (alpha + 1.0) / (alpha + 1.0)
        left = ((2 * np.pi) ** (alpha + 1.0) - (2 * np.pi - h / 2.0) ** (alpha + 1.0)) / (alpha + 1.0)
        tvals[0] = (right + left) / h
        factors.append(tvals)
    vals = np.ones((1,) * grid_g.ndim)
    for i, fac in enumerate(factors):
        shape = [1] * grid_g.ndim
        shape[i] = len(fac)
        vals = vals * fac.reshape(shape)
    return Field(grid_g, vals.astype(complex))


def _graded_simpson(fn, a: float, b: float, npanels: int) -> complex:
    """Composite Simpson rule on [a, b] (npanels even intervals)."""
    xs = np.linspace(a, b, npanels + 1)
    ys = fn(xs)
    h = (b - a) / npanels
    return complex(h / 3.0 * (ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-2:2].sum()))


def gaussian_me_1d(alpha: float, k, family: OrthFamily = None, npanels: int = 8192) -> dict:
    """The two one-dimensional factor integrals of the matrix element
    <F f_alpha(k) Phi_0^k, Phi_0^k>:

        t factor  I_t(alpha, kappa)  = int_0^{2 pi} t^alpha e^{i kappa t} dt / (2 pi),
        q factor  I_q(alpha, ||k||)  = int_{-1}^{1} |u|^alpha e^{-||k|| u^2 / 4} du,

    each evaluated on a graded mesh (grading exponent 2 toward the
    singularity at 0).  The full matrix element is
    prod_i I_t(alpha, k_i) * I_q(alpha, ||k||)^{2n}.
    """
    if alpha <= -1.0:
        raise BadAlpha("alpha must exceed -1 for the factor integrals")
    kf = as_freq(k)
    kn = kf.norm
    tfs = []
    for kappa in kf.k:
        # t = 2 pi u^2: dt = 4 pi u du; t^alpha = (2 pi)^alpha u^(2 alpha)
        def tf(u, kp=kappa):
            return (2.0 * np.pi) ** alpha * u ** (2.0 * alpha + 1.0) * np.exp(2j * np.pi * kp * u * u) * 2.0

        tfs.append(_graded_simpson(tf, 0.0, 1.0, npanels))
    # u = v^2: du = 2 v dv; |u|^alpha = v^(2 alpha); doubled for the sign
    def qf(v):
        return 4.0 * v ** (2.0 * alpha + 1.0) * np.exp(-kn * v ** 4 / 4.0)

    qfac = _graded_simpson(qf, 0.0, 1.0, npanels).real
    return {"t_factors": tfs, "q_factor": qfac, "k": kf.k, "knorm": kn}


def matrix_element_f_alpha(alpha: float, k, n: int, npanels: int = 8192) -> complex:
    """<F f_alpha(k) Phi_0^k, Phi_0^k> assembled from the factor integrals.

    Uses the closed form <pi_k(q,p,t) Phi_0^k, Phi_0^k> =
    e^{i k.t} e^{-||k|| |(q,p)|^2 / 4} (constant 1 at the identity, as the
    unit normalization forces)."""
    parts = gaussian_me_1d(alpha, k, npanels=npanels)
    me = complex(np.prod(parts["t_factors"])) * parts["q_factor"] ** (2 * n)
    return me


def divergence_partial_sums(alpha: float, rprime: float, kmax: int, family: OrthFamily, npanels: int = 4096) -> dict:
    """Partial sums

        S(K) = sum_{0 < k_i <= K} |<F f_alpha(k) Phi_0^k, Phi_0^k>|^{r'}
               (2 pi)^(-n) ||k||^n

    over the positive orthant of Z^m, with growth diagnostics.  The series
    diverges when (m + n)(alpha + 1) r' - n <= m and converges otherwise;
    alpha must exceed -1/2 (square integrability of f_alpha).
    """
    n, m = family.n, family.m
    if alpha <= -0.5:
        raise BadAlpha("alpha must exceed -1/2")
    if rprime <= 1.0:
        raise BadRange("rprime must exceed 1")
    if kmax < 2:
        raise BadRange("kmax must be at least 2")
    Ks = np.arange(1, kmax + 1)
    terms = np.zeros(kmax)
    for kidx in np.ndindex(*([kmax] * m)):
        kvec = tuple(i + 1 for i in kidx)
        me = matrix_element_f_alpha(alpha, kvec, n, npanels=npanels)
        w = alpha_weight(kvec, n)
        shell = max(kvec)
        terms[shell - 1] += abs(me) ** rprime * w
    S = np.cumsum(terms)
    logK = np.log(Ks.astype(float))
    # least squares fit S ~ a log K + b over the tail half
    sel = Ks >= max(2, kmax // 2)
    A = np.vstack([logK[sel], np.ones(sel.sum())]).T
    coef, res, *_ = np.linalg.lstsq(A, S[sel], rcond=None)
    fitted = A @ coef
    ss_res = float(np.sum((S[sel] - fitted) ** 2))
    ss_tot = float(np.sum((S[sel] - S[sel].mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {
        "K": Ks,
        "S": S,
        "increasing": bool(np.all(np.diff(S) > 0)),
        "log_slope": float(coef[0]),
        "log_fit_r2": float(r2),
        "threshold_exponent": (m + n) * (alpha + 1.0) * rprime - n,
        "divergent_regime": (m + n) * (alpha + 1.0) * rprime - n <= m,
    }


def doubling_increments(S: np.ndarray, ladder=(8, 16, 32, 64)) -> list:
    """S(2K) - S(K) along a doubling ladder (K values must index into S)."""
    out = []
    for K in ladder[:-1]:
        out.append(float(S[2 * K - 1] - S[K - 1]))
    return out
