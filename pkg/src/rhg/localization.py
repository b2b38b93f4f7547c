"""Gaussian-wavelet localization operators and their product calculus.

With the wavelet phi(x) = 2^(n/4) e^(-|x|^2/2) (squared norm (2 pi)^(n/2))
the localization operator with symbol F on R^{2n} is

    (L^k_F f)(x) = (2 pi)^(-n) ||k||^n int F(q, p) <f, pi_k(q, p) phi>
                   (pi_k(q, p) phi)(x) dq dp.

Two exact identities drive this module.  First, L^k_F is the k-Weyl operator
with symbol sigma determined in frequency space by

    sigmahat(q, p) = (2 pi)^(n/2) Fhat^k(q, p) Lambdahat^k(q, p),

where F^k(q, p) = F(B_k p / ||k||^2, -B_k^t q / ||k||^2) is the reindexed
symbol, Fhat^k(q, p) = ||k||^(2n) Fhat(B_k p, -B_k^t q), and

    Lambdahat^k(q, p) = e^(-|p|^2/4 - ||k||^2 |q|^2 / 4)

is the transform of Lambda^k(q, p) = 2^n |det B_k|^{-1}
e^(-|((B_k^t)^{-1} q, p)|^2).  Equivalently sigma = (2 pi)^(-n/2) F^k * Lambda^k
with the plain 2n-dimensional convolution; the (2 pi)^(n/2) factor is fixed
by the convolution theorem (a * b)^ = (2 pi)^n ahat bhat in 2n variables
and is confirmed numerically by the suite.

Second, products: L^k_F L^k_G = L^k_H holds for

    Hhat^k = (2 pi)^(-n/2) (Fhat^k (*) Ghat^k),

where (*) is the Gaussian-weighted twisted convolution

    (A (*) B)(xi, eta) = int A(xi - q, eta - p) B(q, p)
        e^(-(|p|^2 + ||k||^2 |q|^2)/2) e^((<eta, p> + ||k||^2 <xi, q>)/2)
        e^((i/2) k.[(xi, eta), (q, p)]) dq dp.

The constant (2 pi)^(-n/2) again follows from the k-Weyl product rule
applied to the exact sigmahat above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import OrthFamily
from .errors import GridMismatch, OutOfWindow
from .fields import Field, Grid, ft_at
from .rep_fourier import as_freq, lattice_shift_table
from .weyl_k import fourier_wigner_k, weyl_apply_from_hat


# ----------------------------------------------------------------------
# the admissible wavelet
# ----------------------------------------------------------------------
def gaussian_wavelet(grid_x: Grid) -> Field:
    """phi(x) = 2^(n/4) e^(-|x|^2/2); note ||phi||^2 = (2 pi)^(n/2)."""
    n = grid_x.ndim

    def fn(*mesh):
        r2 = sum(m * m for m in mesh)
        return 2.0 ** (n / 4.0) * np.exp(-0.5 * r2)

    return Field.sample(grid_x, fn)


@dataclass(frozen=True)
class WaveletConfig:
    """The wavelet, its measured squared norm, and the per-k resolution-of-
    identity constant c_phi(k) = (2 pi)^{m+n} ||k||^{-n} ||phi||^2 such that

        <f, g> = c_phi^{-1} int_G <f, pi_k phi> <pi_k phi, g> dq dp dt.
    """

    phi: Field
    m: int
    norm_sq: float

    @staticmethod
    def default(grid_x: Grid, m: int) -> "WaveletConfig":
        phi = gaussian_wavelet(grid_x)
        return WaveletConfig(phi, m, phi.norm() ** 2)

    def c_phi(self, k) -> float:
        n = self.phi.grid.ndim
        kf = as_freq(k, self.m)
        return (2.0 * np.pi) ** (self.m + n) * kf.norm ** (-n) * self.norm_sq


# ----------------------------------------------------------------------
# the localization operator
# ----------------------------------------------------------------------
def localize(F: Field, k, f: Field, family: OrthFamily, wavelet: WaveletConfig) -> Field:
    """(L^k_F f)(x) by direct quadrature of the defining (q, p) integral.

    The (q, p) lattice is F's grid; its p axes must lie on the state lattice.
    """
    k = as_freq(k, family.m)
    n = family.n
    if F.grid.ndim != 2 * n:
        raise GridMismatch("symbol must live on a (q, p) grid")
    phi = wavelet.phi
    Bk = family.assemble(k.vec)
    gq = Grid(F.grid.axes[:n])
    gp = Grid(F.grid.axes[n:])
    pnodes = [gp.nodes(i) for i in range(n)]

    nx = int(np.prod(phi.grid.shape))
    npp = int(np.prod(gp.shape))
    phi_shift = lattice_shift_table(phi, pnodes).reshape(nx, npp)  # phi(x + p)
    w_state = phi.grid.cell_weight()

    qmesh = np.meshgrid(*[gq.nodes(i) for i in range(n)], indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh])
    u = Bk.T @ qstack  # (n, Nq)
    xmesh = np.meshgrid(*[phi.grid.nodes(i) for i in range(n)], indexing="ij")
    xstack = np.stack([xm.ravel() for xm in xmesh])
    pmesh = np.meshgrid(*pnodes, indexing="ij")
    pstack = np.stack([pm.ravel() for pm in pmesh])

    eix = np.exp(1j * (xstack.T @ u))  # (Nx, Nq): e^{i u.x}
    half = np.exp(0.5j * (u.T @ pstack))  # (Nq, Np): e^{i u.p/2}

    # wavelet coefficients <f, pi_k(q, p) phi> = conj( <pi_k(q,p) phi, f> )
    #   <pi phi, f> = sum_x e^{i u.(x + p/2)} phi(x+p) conj(f(x)) w
    inner = (np.conj(eix * np.conj(f.values.reshape(nx, 1))).T @ phi_shift) * np.conj(half) * w_state
    # inner[q, p] = <f, pi_k(q,p) phi>  (conjugate of the sum above)
    # reconstruct: out(x) = c int F(q,p) inner(q,p) e^{i u.(x + p/2)} phi(x+p)
    Fv = F.values.reshape(len(qstack[0]), npp)
    J = eix @ (Fv * inner * half)  # (Nx, Np)
    out = np.sum(J * phi_shift, axis=1) * gq.cell_weight() * gp.cell_weight()
    out = out * (2.0 * np.pi) ** (-n) * k.norm ** n
    return Field(f.grid, out.reshape(f.grid.shape))


def identity_reconstruction(k, f: Field, family: OrthFamily, wavelet: WaveletConfig, grid_qp: Grid) -> Field:
    """Resolution of identity: localize with F == 1 divided by ||phi||^2
    reproduces f, equivalently the c_phi-normalized G integral."""
    ones = Field(grid_qp, np.ones(grid_qp.shape, dtype=complex))
    raw = localize(ones, k, f, family, wavelet)
    kf = as_freq(k, family.m)
    scale = (2.0 * np.pi) ** (family.m + family.n) * kf.norm ** (-family.n) / wavelet.c_phi(k)
    return raw.with_values(raw.values * scale)


# ----------------------------------------------------------------------
# reindexed symbols and the Gaussian envelope
# ----------------------------------------------------------------------
def reindex_symbol(F: Field, k, family: OrthFamily) -> Field:
    """F^k(q, p) = F(B_k p / ||k||^2, -B_k^t q / ||k||^2) by band-limited
    resampling on F's own grid."""
    from .fields import field_at

    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    g2 = F.grid
    qmesh = np.meshgrid(*[g2.nodes(i) for i in range(2 * n)], indexing="ij")
    qstack = np.stack([qm.ravel() for qm in qmesh[:n]])
    pstack = np.stack([pm.ravel() for pm in qmesh[n:]])
    # arguments of F
    a = (Bk @ pstack) / k.norm ** 2  # first block
    b = -(Bk.T @ qstack) / k.norm ** 2  # second block
    pts = np.concatenate([a, b])  # (2n, Npts)
    vals = _interp_at_points(F, pts)
    return Field(g2, vals.reshape(g2.shape))


def _interp_at_points(F: Field, pts: np.ndarray) -> np.ndarray:
    """Trigonometric interpolation of F at scattered points (d, Npts)."""
    fhat = F.fourier()
    d = F.grid.ndim
    duals = [fhat.grid.nodes(i) for i in range(d)]
    scale = 1.0
    acc = fhat.values
    for i in range(d):
        e = np.exp(1j * np.outer(pts[i], duals[i]))  # (Npts, Nxi)
        # contract the leading grid axis of acc, pointwise in the point index
        acc = np.einsum("Pk,k...->P...", e, acc) if i == 0 else np.einsum("Pk,Pk...->P...", e, acc)
        scale *= fhat.grid.axes[i].weight / np.sqrt(2.0 * np.pi)
    return acc * scale


def lambda_symbol(k, grid_qp: Grid, family: OrthFamily) -> tuple:
    """The Gaussian envelope pair (Lambda^k, Lambdahat^k) on the (q, p) grid."""
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    Bti = np.linalg.inv(Bk.T)
    det = abs(np.linalg.det(Bk))
    mesh = grid_qp.meshgrid()
    qs = np.stack([m.ravel() for m in mesh[:n]])
    ps = np.stack([m.ravel() for m in mesh[n:]])
    arg = np.sum((Bti @ qs) ** 2, axis=0) + np.sum(ps ** 2, axis=0)
    lam = (2.0 ** n / det) * np.exp(-arg)
    lam_hat = np.exp(-0.25 * np.sum(ps ** 2, axis=0) - 0.25 * k.norm ** 2 * np.sum(qs ** 2, axis=0))
    return (
        Field(grid_qp, lam.reshape(grid_qp.shape)),
        Field(grid_qp, lam_hat.reshape(grid_qp.shape)),
    )


def loc_weyl_symbol_hat(F: Field, k, family: OrthFamily) -> Field:
    """sigmahat of the Weyl operator equal to L^k_F:

        sigmahat(q, p) = (2 pi)^(n/2) Fhat^k(q, p) Lambdahat^k(q, p),

    with Fhat^k(q, p) = ||k||^(2n) Fhat(B_k p, -B_k^t q) evaluated by the
    semidiscrete transform of F."""
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    g2 = F.grid
    mesh = g2.meshgrid()
    qs = np.stack([m.ravel() for m in mesh[:n]])
    ps = np.stack([m.ravel() for m in mesh[n:]])
    # targets of Fhat: (B_k p, -B_k^t q)
    t1 = Bk @ ps
    t2 = -(Bk.T @ qs)
    fhat_vals = _ft_at_points(F, np.concatenate([t1, t2]))
    fk_hat = k.norm ** (2 * n) * fhat_vals
    _, lam_hat = lambda_symbol(k, g2, family)
    vals = (2.0 * np.pi) ** (n / 2.0) * fk_hat.reshape(g2.shape) * lam_hat.values
    return Field(g2, vals)


def _ft_at_points(F: Field, pts: np.ndarray) -> np.ndarray:
    """Semidiscrete forward transform of F at scattered frequency points."""
    d = F.grid.ndim
    vals = F.values
    acc = vals
    scale = 1.0
    for i in range(d):
        nodes = F.grid.nodes(i)
        e = np.exp(-1j * np.outer(pts[i], nodes))  # (Npts, Nx)
        acc = np.einsum("Pk,k...->P...", e, acc) if i == 0 else np.einsum("Pk,Pk...->P...", e, acc)
        scale *= F.grid.axes[i].weight / np.sqrt(2.0 * np.pi)
    return acc * scale


def loc_as_weyl_gap(F: Field, k, f: Field, family: OrthFamily, wavelet: WaveletConfig) -> dict:
    """Relative L2 gap between L^k_F f and the Weyl application of the exact
    symbol sigmahat = (2 pi)^(n/2) Fhat^k Lambdahat^k."""
    lhs = localize(F, k, f, family, wavelet)
    sh = loc_weyl_symbol_hat(F, k, family)
    rhs = weyl_apply_from_hat(sh, k, f, family)
    num = np.sqrt(np.sum(np.abs(lhs.values - rhs.values) ** 2))
    den = np.sqrt(np.sum(np.abs(f.values) ** 2))
    return {"lhs_norm": lhs.norm(), "rhs_norm": rhs.norm(), "rel_gap": float(num / den)}


# ----------------------------------------------------------------------
# the lemma kernel: Fourier transform of the coefficient field
# ----------------------------------------------------------------------
def lemma_kernel_ft(f: Field, k, x_index: tuple, family: OrthFamily, wavelet: WaveletConfig, grid_qp: Grid) -> Field:
    """Closed form of the (q, p) Fourier transform of

        f_{k,x}(q, p) = <f, pi_k(q, p) phi> (pi_k(q, p) phi)(x)

    at the grid point x = x_index:

        fhat_{k,x}(xi, eta) = (2 pi)^(n/2) |det B_k|^{-1}
            [pi_k(B_k eta / ||k||^2, -B_k^{-1} xi) f](x)
            V_k(phi, phi)(-B_k eta / ||k||^2, B_k^{-1} xi).
    """
    from .fields import field_at

    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    Bki = np.linalg.inv(Bk)
    det = abs(np.linalg.det(Bk))
    phi = wavelet.phi
    mesh = grid_qp.meshgrid()
    xis = np.stack([m.ravel() for m in mesh[:n]])
    etas = np.stack([m.ravel() for m in mesh[n:]])
    a = (Bk @ etas) / k.norm ** 2  # rep q argument
    b = -(Bki @ xis)  # rep p argument
    xv = np.array([f.grid.nodes(i)[x_index[i]] for i in range(n)])
    # [pi_k(a, b) f](x) = e^{i a.B_k(x + b/2)} f(x + b)
    fx = _interp_at_points(f, xv[:, None] + b)
    phase = np.exp(1j * np.sum((Bk.T @ a) * (xv[:, None] + 0.5 * b), axis=0))
    rep_part = phase * fx

    # V_k(phi, phi)(-a, -b) for the Gaussian wavelet: e^{-|b|^2/4 - ||k||^2 |a|^2 / 4}
    wig = np.exp(-0.25 * np.sum(b ** 2, axis=0) - 0.25 * k.norm ** 2 * np.sum(a ** 2, axis=0))
    vals = (2.0 * np.pi) ** (n / 2.0) / det * rep_part * wig
    return Field(grid_qp, vals.reshape(grid_qp.shape))


def coefficient_field(f: Field, k, x_index: tuple, family: OrthFamily, wavelet: WaveletConfig, grid_qp: Grid) -> Field:
    """f_{k,x}(q, p) itself, for cross-checking the lemma by direct FFT."""
    k = as_freq(k, family.m)
    n = family.n
    phi = wavelet.phi
    V = fourier_wigner_k(phi, f, k, family, grid_qp)  # (2 pi)^{-n/2} <pi phi, f>
    inner = np.conj(V.values) * (2.0 * np.pi) ** (n / 2.0)  # <f, pi phi>
    # (pi_k(q,p) phi)(x) at the fixed x
    Bk = family.assemble(k.vec)
    mesh = grid_qp.meshgrid()
    qs = np.stack([m.ravel() for m in mesh[:n]])
    ps = np.stack([m.ravel() for m in mesh[n:]])
    xv = np.array([f.grid.nodes(i)[x_index[i]] for i in range(n)])
    phi_at = _interp_at_points(phi, xv[:, None] + ps)
    phase = np.exp(1j * np.sum((Bk.T @ qs) * (xv[:, None] + 0.5 * ps), axis=0))
    vals = inner.ravel() * phase * phi_at
    return Field(grid_qp, vals.reshape(grid_qp.shape))


# ----------------------------------------------------------------------
# the product convolution and symbol classes
# ----------------------------------------------------------------------
def new_conv(F_hat: Field, G_hat: Field, k, family: OrthFamily) -> Field:
    """Gaussian-weighted twisted convolution (A (*) B)(xi, eta); direct
    double sum on the common grid."""
    if F_hat.grid.shape != G_hat.grid.shape:
        raise GridMismatch("new_conv needs a common grid")
    k = as_freq(k, family.m)
    n = family.n
    if n != 1:
        raise GridMismatch("new_conv is implemented for n = 1 at desk scale")
    Bk = family.assemble(k.vec)
    b = float(Bk[0, 0])
    kn2 = k.norm ** 2
    g2 = F_hat.grid
    qn, pn = g2.nodes(0), g2.nodes(1)
    Nq, Np = g2.shape
    w = g2.cell_weight()
    oq = int(np.rint(-qn[0] / g2.axes[0].spacing))
    op = int(np.rint(-pn[0] / g2.axes[1].spacing))
    Fv, Gv = F_hat.values, G_hat.values
    out = np.zeros((Nq, Np), dtype=complex)
    ip = np.arange(Np)
    dp = ip[:, None] - ip[None, :] + op
    validp = (dp >= 0) & (dp < Np)
    dpc = np.clip(dp, 0, Np - 1)
    # stationary Gaussian weight e^{-(p^2 + ||k||^2 q^2)/2} on the (q, p) block
    gauss = np.exp(-0.5 * (pn[None, :] ** 2 + kn2 * qn[:, None] ** 2))
    # cross terms e^{(<eta, p> + ||k||^2 <xi, q>)/2}
    e_eta_p = np.exp(0.5 * np.outer(pn, pn))  # (eta, p) -> uses value grids
    e_xi_q = np.exp(0.5 * kn2 * np.outer(qn, qn))  # (xi, q)
    ph_eta = np.exp(0.5j * b * np.outer(qn, pn))  # (q, eta)
    ph_xi = np.exp(-0.5j * b * np.outer(qn, pn))  # (xi, p)
    iq = np.arange(Nq)
    for a in range(Nq):
        dq = iq - a + oq
        validq = (dq >= 0) & (dq < Nq)
        Fq = Fv[np.clip(dq, 0, Nq - 1)] * validq[:, None]  # (xi, row of F)
        T = Fq[:, dpc] * validp[None, :, :]  # (xi, eta, p) = F(xi-q, eta-p)
        W1 = (Gv[a] * gauss[a])[None, :] * ph_xi  # (xi, p)
        out += np.einsum("xep,xp,ep->xe", T, W1, e_eta_p) * (
            ph_eta[a][None, :] * e_xi_q[:, a][:, None]
        )
    return Field(g2, out * w)


def c_epsilon(c: float, eps: float) -> float:
    """Decay budget c - c*eps - 1/4 of the product symbol, valid on the open
    window 4c/(8c+1) < eps < 1 - 1/(4c) (nonempty iff c > (1 + sqrt(5))/8)."""
    if c <= (1.0 + np.sqrt(5.0)) / 8.0:
        raise OutOfWindow("window is empty for this c")
    lo = 4.0 * c / (8.0 * c + 1.0)
    hi = 1.0 - 1.0 / (4.0 * c)
    if not (lo < eps < hi):
        raise OutOfWindow(f"eps must lie in ({lo:.6g}, {hi:.6g})")
    return c - c * eps - 0.25


@dataclass(frozen=True)
class WcReport:
    c: float
    ladder_fractions: tuple
    witness_norms: tuple
    verdict: str  # "member" | "nonmember" | "inconclusive"


def wclass_ladder(F_hat_k: Field, c: float, k, family: OrthFamily, fractions=(0.25, 0.4, 0.55, 0.7, 0.85, 1.0)) -> WcReport:
    """L2 norms of e^{c |(B_k xi, eta)|^2} Fhat^k on nested centered subgrids.

    Member if the ladder has converged (relative last increment < 1e-6),
    nonmember if increments grow geometrically, else inconclusive.
    """
    k = as_freq(k, family.m)
    n = family.n
    g2 = F_hat_k.grid
    mesh = g2.meshgrid()
    xis = np.stack([m.ravel() for m in mesh[:n]])
    etas = np.stack([m.ravel() for m in mesh[n:]])
    weight = np.exp(c * (k.norm ** 2 * np.sum(xis ** 2, axis=0) + np.sum(etas ** 2, axis=0)))
    dens = (np.abs(F_hat_k.values.ravel()) ** 2) * weight ** 2
    dens = dens.reshape(g2.shape)
    w = g2.cell_weight()
    norms = []
    for frac in fractions:
        sl = []
        for ax in g2.axes:
            half = max(int(np.floor(ax.n / 2 * frac)), 1)
            mid = ax.n // 2
            sl.append(slice(mid - half, min(mid + half, ax.n)))
        norms.append(float(np.sqrt(np.sum(dens[tuple(sl)]) * w)))
    norms = tuple(norms)
    incs = np.diff(norms)
    verdict = "inconclusive"
    if norms[-1] > 0:
        if incs.size and abs(incs[-1]) < 1e-6 * norms[-1]:
            verdict = "member"
        elif (
            incs.size >= 2
            and incs[-1] > 0
            and incs[-2] > 0
            and incs[-1] > 2.0 * incs[-2]
            and incs[-1] > 0.5 * norms[-2]
        ):
            # sustained geometric growth, not a small noise-floor uptick
            verdict = "nonmember"
    return WcReport(c, tuple(fractions), norms, verdict)


def wclass_test(F: Field, c: float, k, family: OrthFamily, fractions=(0.25, 0.4, 0.55, 0.7, 0.85, 1.0)) -> WcReport:
    """Membership ladder for a position-space symbol F: builds Fhat^k by the
    semidiscrete transform and runs the witness ladder."""
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    g2 = F.grid
    mesh = g2.meshgrid()
    qs = np.stack([m.ravel() for m in mesh[:n]])
    ps = np.stack([m.ravel() for m in mesh[n:]])
    fhat_vals = _ft_at_points(F, np.concatenate([Bk @ ps, -(Bk.T @ qs)]))
    fk_hat = Field(g2, (k.norm ** (2 * n) * fhat_vals).reshape(g2.shape))
    return wclass_ladder(fk_hat, c, k, family, fractions)


def product_symbol_hat(F: Field, G: Field, k, family: OrthFamily) -> Field:
    """Hhat^k = (2 pi)^(-n/2) (Fhat^k (*) Ghat^k) for position-space symbols
    F, G (Gaussian decay assumed)."""
    k = as_freq(k, family.m)
    n = family.n
    fh = _reindexed_hat(F, k, family)
    gh = _reindexed_hat(G, k, family)
    conv = new_conv(fh, gh, k, family)
    return conv.with_values(conv.values * (2.0 * np.pi) ** (-n / 2.0))


def _reindexed_hat(F: Field, k, family: OrthFamily) -> Field:
    n = family.n
    Bk = family.assemble(k.vec)
    g2 = F.grid
    mesh = g2.meshgrid()
    qs = np.stack([m.ravel() for m in mesh[:n]])
    ps = np.stack([m.ravel() for m in mesh[n:]])
    vals = _ft_at_points(F, np.concatenate([Bk @ ps, -(Bk.T @ qs)]))
    return Field(g2, (k.norm ** (2 * n) * vals).reshape(g2.shape))


def symbol_from_reindexed_hat(H_hat_k: Field, k, family: OrthFamily, grid_qp: Grid) -> Field:
    """Recover the position-space symbol H on grid_qp from Hhat^k:

        H(a, b) = H^k(-B_k b, B_k^t a),  H^k = inverse transform of Hhat^k,

    evaluated by the semidiscrete inverse at the mapped points."""
    k = as_freq(k, family.m)
    n = family.n
    Bk = family.assemble(k.vec)
    mesh = grid_qp.meshgrid()
    avals = np.stack([m.ravel() for m in mesh[:n]])
    bvals = np.stack([m.ravel() for m in mesh[n:]])
    pts = np.concatenate([-(Bk @ bvals), Bk.T @ avals])
    # inverse transform of H_hat_k at the scattered points
    d = 2 * n
    acc = H_hat_k.values
    scale = 1.0
    for i in range(d):
        nodes = H_hat_k.grid.nodes(i)
        e = np.exp(1j * np.outer(pts[i], nodes))
        acc = np.einsum("Pk,k...->P...", e, acc) if i == 0 else np.einsum("Pk,Pk...->P...", e, acc)
        scale *= H_hat_k.grid.axes[i].weight / np.sqrt(2.0 * np.pi)
    return Field(grid_qp, (acc * scale).reshape(grid_qp.shape))


def product_symbol_gap(F: Field, G: Field, k, f: Field, family: OrthFamily, wavelet: WaveletConfig) -> dict:
    """Compare L^k_F (L^k_G f) against L^k_H f with H rebuilt from
    Hhat^k = (2 pi)^(-n/2) (Fhat^k (*) Ghat^k)."""
    lhs = localize(F, k, localize(G, k, f, family, wavelet), family, wavelet)
    Hhk = product_symbol_hat(F, G, k, family)
    H = symbol_from_reindexed_hat(Hhk, k, family, F.grid)
    rhs = localize(H, k, f, family, wavelet)
    num = np.sqrt(np.sum(np.abs(lhs.values - rhs.values) ** 2))
    den = np.sqrt(np.sum(np.abs(f.values) ** 2))
    return {"lhs_norm": lhs.norm(), "rhs_norm": rhs.norm(), "rel_gap": float(num / den)}
