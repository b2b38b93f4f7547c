"""Hermite functions, Laguerre polynomials and derived special functions.

The normalized Hermite functions h_k satisfy the three-term recurrence

    h_{k+1}(x) = x sqrt(2/(k+1)) h_k(x) - sqrt(k/(k+1)) h_{k-1}(x),

run forward from h_0(x) = pi^(-1/4) e^(-x^2/2).  This form avoids the
factorial overflow of the unnormalized recurrence and is stable in double
precision through degree 32, which is the documented range.
"""

from __future__ import annotations

import numpy as np

from .errors import BadOrder, NegativeDegree
from .fields import Field, Grid

MAX_STABLE_DEGREE = 32


def hermite_values(k: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite function h_k on sample points x."""
    if k < 0:
        raise NegativeDegree("hermite degree must be >= 0")
    x = np.asarray(x, dtype=float)
    h_prev = np.zeros_like(x)
    h = np.pi ** (-0.25) * np.exp(-0.5 * x * x)
    for j in range(k):
        h, h_prev = x * np.sqrt(2.0 / (j + 1)) * h - np.sqrt(j / (j + 1.0)) * h_prev, h
    return h


def hermite_h(k: int, grid: Grid) -> Field:
    """h_k sampled on a one-axis grid, as a unit vector in the discrete L2."""
    if grid.ndim != 1:
        raise BadOrder("hermite_h expects a one-axis grid")
    return Field(grid, hermite_values(k, grid.nodes(0)).astype(complex))


def laguerre(k: int, alpha: float, x: np.ndarray) -> np.ndarray:
    """Laguerre polynomial L_k^alpha by the standard recurrence."""
    if alpha <= -1:
        raise BadOrder("laguerre order must exceed -1")
    if k < 0:
        raise NegativeDegree("laguerre degree must be >= 0")
    x = np.asarray(x, dtype=float)
    L_prev = np.zeros_like(x)
    L = np.ones_like(x)
    for j in range(k):
        L, L_prev = (((2 * j + 1 + alpha - x) * L - (j + alpha) * L_prev) / (j + 1), L)
    return L


def phi_gamma(gamma, grid: Grid) -> Field:
    """Tensor Hermite function Phi_gamma(x) = prod_j h_{gamma_j}(x_j) on an
    n-axis grid."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=int))
    if np.any(gamma < 0):
        raise NegativeDegree("multi-index entries must be >= 0")
    if gamma.size != grid.ndim:
        raise BadOrder(f"multi-index length {gamma.size} != grid dimension {grid.ndim}")
    vals = np.ones((1,) * grid.ndim, dtype=complex)
    for i, gi in enumerate(gamma):
        v = hermite_values(int(gi), grid.nodes(i))
        shape = [1] * grid.ndim
        shape[i] = v.size
        vals = vals * v.reshape(shape)
    return Field(grid, np.broadcast_to(vals, grid.shape).copy())


def phi_gamma_k(gamma, knorm: float, grid: Grid) -> Field:
    """Scaled Hermite state ||k||^(n/4) Phi_gamma(sqrt(||k||) x); unit norm
    for any positive scale."""
    gamma = np.atleast_1d(np.asarray(gamma, dtype=int))
    if np.any(gamma < 0):
        raise NegativeDegree("multi-index entries must be >= 0")
    s = np.sqrt(float(knorm))
    vals = np.ones((1,) * grid.ndim, dtype=complex)
    for i, gi in enumerate(gamma):
        v = s ** 0.5 * hermite_values(int(gi), s * grid.nodes(i))
        shape = [1] * grid.ndim
        shape[i] = v.size
        vals = vals * v.reshape(shape)
    return Field(grid, np.broadcast_to(vals, grid.shape).copy())


def special_hermite(gamma, eta, grid_x: Grid, grid_qp: Grid) -> Field:
    """Special Hermite function Phi_{gamma eta} = V(Phi_gamma, Phi_eta) on a
    2n-dimensional (q, p) grid, where

        V(f, g)(q, p) = (2 pi)^(-n/2) int e^{i q.(x + p/2)} f(x + p) conj(g(x)) dx.

    The p shift is evaluated by exact charge of variable on the Hermite
    samples, so grid_x only fixes the quadrature lattice.
    """
    n = grid_x.ndim
    if grid_qp.ndim != 2 * n:
        raise BadOrder("qp grid must have twice the axes of the x grid")
    f = phi_gamma(gamma, grid_x)
    g = phi_gamma(eta, grid_x)
    return fourier_wigner_euclidean(f, g, grid_qp)


def fourier_wigner_euclidean(f: Field, g: Field, grid_qp: Grid) -> Field:
    """V(f, g) on a (q, p) product grid for f, g on a common x grid.

    Evaluates (2 pi)^(-n/2) <pi(q, p) f, g> with pi(q, p)f(x) =
    e^{i q.(x + p/2)} f(x + p); the x + p values are obtained by band-limited
    interpolation when p is off the x lattice.
    """
    from .fields import field_at

    n = f.grid.ndim
    w = f.grid.cell_weight()
    xnodes = [f.grid.nodes(i) for i in range(n)]
    qnodes = [grid_qp.nodes(i) for i in range(n)]
    pnodes = [grid_qp.nodes(n + i) for i in range(n)]

    # f(x + p) for every (x, p) pair, axis by axis via trig interpolation
    fshift = _shifted_table(f, pnodes)  # shape x-axes + p-axes
    gbar = np.conj(g.values)

    # integrand over x: e^{i q.x} e^{i q.p/2} f(x+p) conj(g(x))
    core = fshift * gbar.reshape(g.values.shape + (1,) * n)  # x..., p...
    out = core
    for i in range(n):
        e = np.exp(1j * np.outer(qnodes[i], xnodes[i]))  # (q_i, x_i)
        out = np.tensordot(e, out, axes=([1], [i]))
        out = np.moveaxis(out, 0, i)
    # out now has axes (q..., p...); add the q.p/2 phase and measure
    phase = np.ones(grid_qp.shape, dtype=complex)
    for i in range(n):
        qi = qnodes[i].reshape((1,) * i + (-1,) + (1,) * (2 * n - i - 1))
        pi_ = pnodes[i].reshape((1,) * (n + i) + (-1,) + (1,) * (n - i - 1))
        phase = phase * np.exp(0.5j * qi * pi_)
    vals = out * phase * w * (2.0 * np.pi) ** (-n / 2.0)
    return Field(grid_qp, vals)


def _shifted_table(f: Field, pnodes) -> np.ndarray:
    """Values f(x + p) on the product of the x grid and the p node lists."""
    from .fields import field_at

    n = f.grid.ndim
    # build target points per axis: x_i + p_i for all combinations
    points = []
    for i in range(n):
        xi = f.grid.nodes(i)
        points.append((xi[:, None] + pnodes[i][None, :]).ravel())
    vals = field_at(f, points)
    # vals axes: (x0*p0, x1*p1, ...); unfold into x..., p... order
    shape = []
    for i in range(n):
        shape.extend([f.grid.axes[i].n, len(pnodes[i])])
    vals = vals.reshape(shape)
    # current order x0 p0 x1 p1 ...; want x0 x1 ... p0 p1 ...
    perm = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    return vals.transpose(perm)
