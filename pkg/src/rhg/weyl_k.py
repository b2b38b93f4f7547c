"""k-Fourier-Wigner and k-Wigner transforms, the k-Weyl transform and its
twisted-convolution product calculus.

Definitions (f, g on R^n, sigma on R^{2n}, k a nonzero integer vector):

    V_k(f, g)(q, p)  = (2 pi)^(-n/2) <pi_k(q, p) f, g>,
    W^k(f, g)        = FT of V_k(f, g)            (unitary, 2n variables),
    (W^k_sigma f)(x) = (2 pi)^(-n) int sigmahat(q, p) (pi_k(q, p) f)(x) dq dp,
    (F *_k G)(xi, eta) = int F(xi - q, eta - p) G(q, p)
                             e^{(i/2) k.[(xi, eta), (q, p)]} dq dp,

with the bracket k.[(xi, eta), (q, p)] = q.B_k eta - xi.B_k p.  The product
rule W^k_sigma W^k_tau = W^k_gamma holds with

    gammahat = (2 pi)^(-n) (sigmahat *_k tauhat),

which follows from the composition law pi_k(a) pi_k(b) =
e^{(i/2) k.[a,b]} pi_k(a + b).
"""

from __future__ import annotations

import numpy as np

from .algebra import OrthFamily
from .errors import GridMismatch, InterpolationOverflow
from .fields import Field, Grid, ft_at
from .rep_fourier import KernelOp, as_freq, lattice_shift_table, rep_matrix_elements


def fourier_wigner_k(f: Field, g: Field, k, family: OrthFamily, grid_qp: Grid = None) -> Field:
    """V_k(f, g) on a (q, p) grid (default: f's grid squared).

    The p nodes must lie on the state lattice; values come from the
    vectorized matrix elements <pi_k(q, p) f, g>.
    """
    k = as_freq(k, family.m)
    n = family.n
    if grid_qp is None:
        grid_qp = Grid(f.grid.axes + f.grid.axes)
    gq = Grid(grid_qp.axes[:n])
    gp = Grid(grid_qp.axes[n:])
    me = rep_matrix_elements(k, f, g, family, gq, gp)
    return Field(grid_qp, me * (2.0 * np.pi) ** (-n / 2.0))


def wigner_k(f: Field, g: Field, k, family: OrthFamily, grid_qp: Grid = None) -> Field:
    """W^k(f, g): the unitary Fourier transform of V_k(f, g)."""
    return fourier_wigner_k(f, g, k, family, grid_qp).fourier()


def symbol_hat(sigma: Field, hat_grid: Grid = None) -> Field:
    """sigmahat sampled on hat_grid by the semidiscrete transform.

    Defaults to the symbol's own lattice, which keeps the subsequent p shifts
    of the operator quadrature exact.
    """
    if hat_grid is None:
        hat_grid = sigma.grid
    targets = [hat_grid.nodes(i) for i in range(hat_grid.ndim)]
    return Field(hat_grid, ft_at(sigma, targets))


def weyl_apply_from_hat(sigma_hat: Field, k, f: Field, family: OrthFamily) -> Field:
    """(W^k_sigma f)(x) from samples of sigmahat on a (q, p) lattice whose p
    axes lie on the state lattice."""
    k = as_freq(k, family.m)
    n = family.n
    if sigma_hat.grid.ndim != 2 * n:
        raise GridMismatch("sigma_hat must live on a (q, p) grid")
    Bk = family.assemble(k.vec)
    gq = Grid(sigma_hat.grid.axes[:n])
    gp = Grid(sigma_hat.grid.axes[n:])
    pnodes = [gp.nodes(i) for i in range(n)]
    shifted = lattice_shift_table(f, pnodes)  # x..., p...
    nx = int(np.prod(f.grid.shape))
    npp = int(np.prod(gp.shape))
    shifted = shifted.reshape(nx, npp)

    qmesh = np.meshgrid(*[gq.nodes(i) for i in range(n)], indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh])
    u = Bk.T @ qstack  # (n, Nq)
    xmesh = np.meshgrid(*[f.grid.nodes(i) for i in range(n)], indexing="ij")
    xstack = np.stack([xm.ravel() for xm in xmesh])
    pmesh = np.meshgrid(*pnodes, indexing="ij")
    pstack = np.stack([pm.ravel() for pm in pmesh])

    phase_x = np.exp(1j * (xstack.T @ u))  # (Nx, Nq)
    half = np.exp(0.5j * (u.T @ pstack))  # (Nq, Np)
    sig = sigma_hat.values.reshape(qstack.shape[1], npp)
    J = phase_x @ (sig * half)  # (Nx, Np)
    out = np.sum(J * shifted, axis=1) * gq.cell_weight() * gp.cell_weight()
    out *= (2.0 * np.pi) ** (-n)
    return Field(f.grid, out.reshape(f.grid.shape))


def weyl_apply(sigma: Field, k, f: Field, family: OrthFamily, hat_grid: Grid = None) -> Field:
    """W^k_sigma f for a symbol sampled in position space."""
    return weyl_apply_from_hat(symbol_hat(sigma, hat_grid), k, f, family)


def weyl_matrix_from_hat(sigma_hat: Field, k, grid_x: Grid, family: OrthFamily) -> KernelOp:
    """Dense kernel of W^k_sigma on L^2(R^n):

        K(x, y) = (2 pi)^(-n) [sum_q sigmahat(q, y - x) e^{i q.B_k (x + y)/2} w_q],

    the p integral collapsing onto p = y - x on the lattice.  Used for
    adjointness and spectral checks at desk scale.
    """
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    gq = Grid(sigma_hat.grid.axes[:n])
    gp = Grid(sigma_hat.grid.axes[n:])
    for i in range(n):
        if abs(grid_x.axes[i].spacing - gp.axes[i].spacing) > 1e-12:
            raise GridMismatch("kernel grid spacing must match the p-axis spacing")

    # half-sum lattice s = (x + y)/2: 2N-1 nodes with spacing dx/2
    svals = [ax.nodes[0] + 0.5 * ax.spacing * np.arange(2 * ax.n - 1) for ax in grid_x.axes]
    smesh = np.meshgrid(*svals, indexing="ij")
    sstack = np.stack([sm.ravel() for sm in smesh])  # (n, Ns)
    targets = Bk.T @ sstack  # phase e^{i q.B_k s} = e^{i (B_k^t q).s}; see below

    qmesh = np.meshgrid(*[gq.nodes(i) for i in range(n)], indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh])  # (n, Nq)
    # e^{i q.B_k s} = e^{i q.(B_k s)}
    bs = Bk @ sstack  # (n, Ns)
    for i in range(n):
        nyq = np.pi / gq.axes[i].spacing
        if np.max(np.abs(bs[i])) > nyq * (1 + 1e-12):
            raise InterpolationOverflow("B_k (x + y)/2 exits the resolvable band")
    E = np.exp(1j * (bs.T @ qstack))  # (Ns, Nq)
    sig = sigma_hat.values.reshape(qstack.shape[1], -1)  # (Nq, Np)
    S1 = (E @ sig) * gq.cell_weight()  # (Ns, Np)
    S1 = S1.reshape(tuple(len(s) for s in svals) + gp.shape)

    nx = [ax.n for ax in grid_x.axes]
    idxmesh = np.meshgrid(*[np.arange(v) for v in nx + nx], indexing="ij")
    s_idx, p_idx = [], []
    mask = np.ones(tuple(nx + nx), dtype=bool)
    for i in range(n):
        ix, iy = idxmesh[i], idxmesh[n + i]
        s_idx.append(ix + iy)
        pax = gp.axes[i]
        origin = int(np.rint(-pax.nodes[0] / pax.spacing))
        pi_ = iy - ix + origin
        mask &= (pi_ >= 0) & (pi_ < pax.n)
        p_idx.append(np.clip(pi_, 0, pax.n - 1))
    kernel = S1[tuple(s_idx) + tuple(p_idx)] * mask
    return KernelOp(grid_x, kernel * (2.0 * np.pi) ** (-n))


# ----------------------------------------------------------------------
# twisted convolution
# ----------------------------------------------------------------------
def twisted_conv(F: Field, G: Field, k, family: OrthFamily, method: str = "direct") -> Field:
    """k-twisted convolution on a common (q, p) grid:

        (F *_k G)(xi, eta) = sum_{q, p} F(xi - q, eta - p) G(q, p)
                             e^{(i/2)(q.B_k eta - xi.B_k p)} w.

    method="direct" is the reference double sum; method="fft" accelerates the
    eta convolution per (xi, q) pair and matches the direct path to rounding.
    """
    if F.grid.shape != G.grid.shape:
        raise GridMismatch("twisted convolution needs a common grid")
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    g2 = F.grid
    if method not in ("direct", "fft"):
        raise GridMismatch(f"unknown method {method!r}")
    if n != 1:
        return _twisted_conv_general(F, G, k, family)

    qn = g2.nodes(0)
    pn = g2.nodes(1)
    Nq, Np = g2.shape
    w = g2.cell_weight()
    b = float(Bk[0, 0])
    Fv, Gv = F.values, G.values

    # lattice index of the origin: node value (i - oq) * dq is xi - q
    oq = int(np.rint(-qn[0] / g2.axes[0].spacing))
    op = int(np.rint(-pn[0] / g2.axes[1].spacing))
    iq = np.arange(Nq)
    ip = np.arange(Np)
    out = np.zeros((Nq, Np), dtype=complex)
    # phase split: e^{(i/2) b q eta} and e^{-(i/2) b xi p}
    ph_eta = np.exp(0.5j * b * np.outer(qn, pn))  # (q, eta)
    ph_xi = np.exp(-0.5j * b * np.outer(qn, pn))  # (xi, p)
    if method == "direct":
        dp = ip[:, None] - ip[None, :] + op  # index of eta - p
        validp = (dp >= 0) & (dp < Np)
        dpc = np.clip(dp, 0, Np - 1)
        for a in range(Nq):  # loop over q
            dq = iq - a + oq  # index of xi - q
            validq = (dq >= 0) & (dq < Nq)
            Fq = Fv[np.clip(dq, 0, Nq - 1)] * validq[:, None]  # (xi, .)
            T = Fq[:, dpc] * validp[None, :, :]  # (xi, eta, p) = F(xi-q, eta-p)
            out += np.einsum("xep,xp->xe", T, Gv[a][None, :] * ph_xi) * ph_eta[a][None, :]
    else:
        # FFT of the p -> eta convolution per (xi, q) pair, zero padded
        Lp = 2 * Np
        for a in range(Nq):
            dq = iq - a + oq
            valid = (dq >= 0) & (dq < Nq)
            Fq = Fv[np.clip(dq, 0, Nq - 1)] * valid[:, None]  # (xi, p-slot)
            g_row = Gv[a][None, :] * ph_xi  # (xi, p)
            fa = np.fft.fft(Fq, n=Lp, axis=1)
            ga = np.fft.fft(g_row, n=Lp, axis=1)
            conv = np.fft.ifft(fa * ga, axis=1)
            # (F conv g)[eta] lives at linear index eta - p + op offset by op
            out += conv[:, op : op + Np] * ph_eta[a][None, :]
    return Field(g2, out * w)


def _twisted_conv_general(F: Field, G: Field, k, family: OrthFamily) -> Field:
    """Direct twisted convolution for n > 1 (desk scale only)."""
    from .algebra import _lattice_shift

    n = family.n
    Bk = family.assemble(k.vec)
    g2 = F.grid
    shape = g2.shape
    w = g2.cell_weight()
    nodes = [g2.nodes(i) for i in range(2 * n)]
    mesh = np.meshgrid(*nodes, indexing="ij")
    xi = np.stack([mesh[i].ravel() for i in range(n)])
    eta = np.stack([mesh[n + i].ravel() for i in range(n)])
    origins = [int(np.rint(-g2.axes[i].nodes[0] / g2.axes[i].spacing)) for i in range(2 * n)]
    out = np.zeros(shape, dtype=complex)
    Gv = G.values
    for idx in np.ndindex(*shape):
        gval = Gv[idx]
        if gval == 0.0:
            continue
        qv = np.array([nodes[i][idx[i]] for i in range(n)])
        pv = np.array([nodes[n + i][idx[n + i]] for i in range(n)])
        vals = F.values
        for i in range(2 * n):
            vals = _lattice_shift(vals, i, idx[i] - origins[i])
        phase = np.exp(0.5j * ((qv @ Bk) @ eta - (Bk @ pv) @ xi)).reshape(shape)
        out += vals * gval * phase
    return Field(g2, out * w)


def weyl_product_gap(sigma: Field, tau: Field, k, f: Field, family: OrthFamily) -> dict:
    """Compare W^k_sigma(W^k_tau f) with W^k_gamma f for
    gammahat = (2 pi)^(-n) sigmahat *_k tauhat; returns both sides and the
    relative L2 gap."""
    n = family.n
    sh = symbol_hat(sigma)
    th = symbol_hat(tau)
    lhs = weyl_apply_from_hat(sh, k, weyl_apply_from_hat(th, k, f, family), family)
    conv = twisted_conv(sh, th, k, family)
    gh = conv.with_values(conv.values * (2.0 * np.pi) ** (-n))
    rhs = weyl_apply_from_hat(gh, k, f, family)
    num = np.sqrt(np.sum(np.abs(lhs.values - rhs.values) ** 2))
    den = np.sqrt(np.sum(np.abs(f.values) ** 2))
    return {
        "lhs_norm": lhs.norm(),
        "rhs_norm": rhs.norm(),
        "rel_gap": float(num / den),
    }
