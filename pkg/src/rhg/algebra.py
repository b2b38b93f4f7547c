"""Group structure of G = R^n x R^n x T^m.

The group law is

    (q, p, t) * (q', p', t') = (q + q', p + p', t + t' + [z, z']/2  mod 2*pi)

with z = (q, p), z' = (q', p') in R^{2n} and bracket components

    [z, z']_j = q'. B_j p  -  q . B_j p',        j = 1 .. m,

built from orthogonal n x n matrices B_1, ..., B_m that pairwise satisfy
B_j^t B_k + B_k^t B_j = 0.  For a nonzero weight vector lam in R^m the
combination B_lam = sum_j lam_j B_j then obeys B_lam B_lam^t = |lam|^2 I,
which drives every determinant and scaling constant downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OffLattice, Unrealizable, ZeroLambda
from .fields import LINE, TORUS, Field

_FAMILY_TOL = 1e-12


# ----------------------------------------------------------------------
# orthogonal anticommuting families
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class OrthFamily:
    n: int
    m: int
    B: np.ndarray  # shape (m, n, n)

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        object.__setattr__(self, "B", B)
        validate_family(self)

    def assemble(self, lam) -> np.ndarray:
        """B_lam = lam_1 B_1 + ... + lam_m B_m for nonzero lam."""
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        if lam.size != self.m:
            raise DimensionMismatch(f"lambda has {lam.size} entries, family has m={self.m}")
        if not np.any(lam):
            raise ZeroLambda("lambda must be nonzero")
        return np.tensordot(lam, self.B, axes=([0], [0]))

    def bracket(self, z, zp) -> np.ndarray:
        """[z, z']_j = q'.B_j p - q.B_j p' for z=(q,p), z'=(q',p') in R^{2n}."""
        z = np.asarray(z, dtype=float).reshape(-1)
        zp = np.asarray(zp, dtype=float).reshape(-1)
        if z.size != 2 * self.n or zp.size != 2 * self.n:
            raise DimensionMismatch("bracket arguments must lie in R^{2n}")
        q, p = z[: self.n], z[self.n :]
        qp, pp = zp[: self.n], zp[self.n :]
        return np.array([qp @ Bj @ p - q @ Bj @ pp for Bj in self.B])


def validate_family(family: OrthFamily) -> None:
    B = family.B
    if B.shape != (family.m, family.n, family.n):
        raise DimensionMismatch(f"B has shape {B.shape}, expected {(family.m, family.n, family.n)}")
    eye = np.eye(family.n)
    for j in range(family.m):
        if np.max(np.abs(B[j] @ B[j].T - eye)) > _FAMILY_TOL:
            raise Unrealizable(f"B_{j + 1} is not orthogonal")
    for j in range(family.m):
        for k in range(j + 1, family.m):
            skew = B[j].T @ B[k] + B[k].T @ B[j]
            if np.max(np.abs(skew)) > _FAMILY_TOL:
                raise Unrealizable(f"B_{j + 1}, B_{k + 1} fail the anticommutation identity")


def _quaternion_units() -> np.ndarray:
    """Left multiplication matrices of 1, i, j, k on R^4."""
    # basis order (1, i, j, k); column c of L_u is u * e_c
    table = {
        "1": np.eye(4),
        "i": np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], dtype=float),
        "j": np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], dtype=float),
        "k": np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], dtype=float),
    }
    return np.stack([table["1"], table["i"], table["j"], table["k"]])


def _octonion_left_units() -> np.ndarray:
    """Left multiplication matrices of the 8 octonion basis units on R^8,
    built by Cayley-Dickson doubling over the quaternions:
    (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))."""

    def qmul(x, y):
        a1, b1, c1, d1 = x
        a2, b2, c2, d2 = y
        return np.array(
            [
                a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
            ]
        )

    def qconj(x):
        return np.array([x[0], -x[1], -x[2], -x[3]])

    def omul(x, y):
        a, b = x[:4], x[4:]
        c, d = y[:4], y[4:]
        return np.concatenate([qmul(a, c) - qmul(qconj(d), b), qmul(d, a) + qmul(b, qconj(c))])

    units = np.zeros((8, 8, 8))
    basis = np.eye(8)
    for u in range(8):
        for c in range(8):
            units[u][:, c] = omul(basis[u], basis[c])
    return units


PRESETS = ("hr-1-1", "hr-2-2", "hr-4-4", "hr-8-8")


def build_family(n: int, m: int) -> OrthFamily:
    """Anticommuting orthogonal family via unit left-multiplications on the
    division algebras R, C, H, O.  Realizable sizes: n in {1, 2, 4, 8} with
    m <= n (larger families are truncated to the first m matrices)."""
    if n < 1 or m < 1:
        raise Unrealizable("n and m must be positive")
    if n == 1:
        mats = np.ones((1, 1, 1))
    elif n == 2:
        mats = np.stack([np.eye(2), np.array([[0.0, -1.0], [1.0, 0.0]])])
    elif n == 4:
        mats = _quaternion_units()
    elif n == 8:
        mats = _octonion_left_units()
    else:
        raise Unrealizable(f"no built-in family for n={n} (presets use n in 1, 2, 4, 8)")
    if m > mats.shape[0]:
        raise Unrealizable(f"cannot produce m={m} matrices for n={n}")
    return OrthFamily(n, m, mats[:m])


def family_preset(name: str) -> OrthFamily:
    if name not in PRESETS:
        raise Unrealizable(f"unknown preset {name!r}; choose from {PRESETS}")
    _, n, m = name.split("-")
    return build_family(int(n), int(m))


def family_from_file(path) -> OrthFamily:
    """Load a family from plain text: one n x n matrix per block, row-major,
    whitespace separated entries, blocks separated by blank lines."""
    text = open(path).read()
    blocks = [b for b in text.split("\n\n") if b.strip()]
    mats = []
    for b in blocks:
        rows = [[float(x) for x in line.split()] for line in b.strip().splitlines()]
        mats.append(np.array(rows))
    if not mats:
        raise Unrealizable("no matrix blocks found")
    n = mats[0].shape[0]
    for mat in mats:
        if mat.shape != (n, n):
            raise DimensionMismatch("all blocks must be square matrices of one size")
    return OrthFamily(n, len(mats), np.stack(mats))


# ----------------------------------------------------------------------
# group elements
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class GroupElement:
    q: np.ndarray
    p: np.ndarray
    t: np.ndarray  # torus coordinates, reduced mod 2*pi

    def __post_init__(self):
        object.__setattr__(self, "q", np.atleast_1d(np.asarray(self.q, dtype=float)))
        object.__setattr__(self, "p", np.atleast_1d(np.asarray(self.p, dtype=float)))
        object.__setattr__(self, "t", np.mod(np.atleast_1d(np.asarray(self.t, dtype=float)), 2.0 * np.pi))

    @property
    def z(self):
        return np.concatenate([self.q, self.p])


def identity_element(n: int, m: int) -> GroupElement:
    return GroupElement(np.zeros(n), np.zeros(n), np.zeros(m))


def multiply(a: GroupElement, b: GroupElement, family: OrthFamily) -> GroupElement:
    if a.q.size != family.n or b.q.size != family.n:
        raise DimensionMismatch("group element dimension does not match family")
    t = a.t + b.t + 0.5 * family.bracket(a.z, b.z)
    return GroupElement(a.q + b.q, a.p + b.p, t)


def inverse(a: GroupElement) -> GroupElement:
    # [z, -z] = 0, so the inverse needs no bracket correction
    return GroupElement(-a.q, -a.p, -a.t)


# ----------------------------------------------------------------------
# left translation of sampled fields on G
# ----------------------------------------------------------------------
def translate(g: Field, a: GroupElement, family: OrthFamily, fractional: bool = False) -> Field:
    """Left translation (tau_a g)(x) = g(a^{-1} * x) of a field on G.

    The grid must be ordered (q axes..., p axes..., t axes...).  The (q, p)
    shift is a lattice shift (zero fill outside the box); pass
    fractional=True to allow off-lattice (q, p) shifts via spectral
    interpolation.  The t shift, including the (q, p) dependent half-bracket
    phase, is applied exactly on the torus modes, so it is exact for fields
    band-limited in t.
    """
    n, m = family.n, family.m
    axes = g.grid.axes
    if len(axes) != 2 * n + m:
        raise DimensionMismatch("field grid must have 2n line axes plus m torus axes")
    for ax in axes[: 2 * n]:
        if ax.kind != LINE:
            raise DimensionMismatch("first 2n axes must be line axes")
    for ax in axes[2 * n :]:
        if ax.kind != TORUS:
            raise DimensionMismatch("last m axes must be torus axes")

    shift = np.concatenate([a.q, a.p])
    vals = g.values
    # spatial part: g(q - a.q, p - a.p)
    for i in range(2 * n):
        ax = axes[i]
        s = shift[i] / ax.spacing
        si = int(np.rint(s))
        if abs(s - si) <= 1e-9:
            vals = _lattice_shift(vals, i, si)
        elif fractional:
            vals = _spectral_shift(vals, i, ax, shift[i])
        else:
            raise OffLattice(f"shift {shift[i]} is off the lattice of axis {i}")

    # torus part: mode j picks phase e^{i j . delta(q, p)} with
    # delta = a.t + [z_a, z]/2 evaluated at the output point (q, p)
    qmesh = np.meshgrid(*[axes[i].nodes for i in range(n)], indexing="ij")
    pmesh = np.meshgrid(*[axes[n + i].nodes for i in range(n)], indexing="ij")
    qmesh = np.broadcast_arrays(
        *[qm[(...,) + (None,) * n] for qm in qmesh], *[pm[(None,) * n + (...,)] for pm in pmesh]
    )
    qq = qmesh[:n]
    pp = qmesh[n:]
    delta = []
    for j in range(m):
        Bj = family.B[j]
        # [z_a, z]_j = q . B_j p_a - q_a . B_j p  with z_a = (q_a, p_a), z = (q, p)
        term = sum(qq[r] * (Bj @ a.p)[r] for r in range(n)) - sum(
            (a.q @ Bj)[r] * pp[r] for r in range(n)
        )
        delta.append(a.t[j] + 0.5 * term)

    for j in range(m):
        axis_index = 2 * n + j
        nt = axes[axis_index].n
        freqs = np.fft.fftfreq(nt, d=1.0 / nt).astype(int)
        modes = np.fft.ifft(vals, axis=axis_index)
        phase = np.exp(1j * freqs[(None,) * (2 * n) + (...,)] * delta[j][..., None])
        # phase has shape (q..., p..., nt); align to the mode array
        expand = phase.reshape(phase.shape[: 2 * n] + (1,) * j + (nt,) + (1,) * (m - j - 1))
        modes = modes * expand
        vals = np.fft.fft(modes, axis=axis_index)
    return Field(g.grid, vals)


def _lattice_shift(vals: np.ndarray, axis: int, si: int) -> np.ndarray:
    """Shift samples so out[idx] = in[idx - si], zero filled."""
    if si == 0:
        return vals
    out = np.zeros_like(vals)
    nax = vals.shape[axis]
    if abs(si) >= nax:
        return out
    src = [slice(None)] * vals.ndim
    dst = [slice(None)] * vals.ndim
    if si > 0:
        dst[axis] = slice(si, None)
        src[axis] = slice(None, nax - si)
    else:
        dst[axis] = slice(None, nax + si)
        src[axis] = slice(-si, None)
    out[tuple(dst)] = vals[tuple(src)]
    return out


def _spectral_shift(vals: np.ndarray, axis: int, ax, shift: float) -> np.ndarray:
    """Fractional shift via the periodic trigonometric interpolant."""
    nax = ax.n
    freqs = 2.0 * np.pi * np.fft.fftfreq(nax, d=ax.spacing)
    sh = [1] * vals.ndim
    sh[axis] = nax
    phase = np.exp(-1j * freqs * shift).reshape(sh)
    return np.fft.ifft(np.fft.fft(vals, axis=axis) * phase, axis=axis)
