import numpy as np
import pytest

from rhg.algebra import GroupElement, build_family, identity_element, inverse, multiply
from rhg.errors import DimensionMismatch, SupportOverflow, TruncationTooSmall
from rhg.fields import Field, grid, line_axis, torus_axis
from rhg.rep_fourier import (
    FreqIndex,
    KernelOp,
    admissibility_constant,
    alpha_weight,
    apply_rep,
    as_freq,
    gft,
    gft_from_coeff,
    invert,
    load_table,
    matrix_element,
    plancherel_gap,
    rep_matrix_elements,
    save_table,
    trace_pi_star,
)
from rhg.specials import phi_gamma, phi_gamma_k

FAM = build_family(1, 1)
GX = grid(line_axis(6.0, 64))
DX = GX.axes[0].spacing
GG = grid(line_axis(6.0, 64), line_axis(6.0, 64), torus_axis(8))


def plancherel_field():
    return Field.sample(
        GG, lambda q, p, t: np.exp(-(q ** 2 + p ** 2) / 2) * (np.exp(1j * t) + 0.5 * np.exp(-2j * t))
    )


def test_freq_index():
    k = as_freq(3)
    assert k.k == (3,) and k.norm == 3.0
    k2 = as_freq((1, -2))
    assert abs(k2.norm - np.sqrt(5.0)) < 1e-15
    with pytest.raises(DimensionMismatch):
        FreqIndex((0, 0))
    with pytest.raises(DimensionMismatch):
        as_freq((1, 2), m=1)


def test_apply_rep_identity():
    phi = Field.sample(GX, lambda x: np.exp(-x * x) * (1 + 0.5j * x))
    out = apply_rep(1, identity_element(1, 1), phi, FAM)
    assert np.max(np.abs(out.values - phi.values)) < 1e-15


def test_apply_rep_unitarity_random():
    rng = np.random.default_rng(77)
    phi = Field.sample(GX, lambda x: np.exp(-x * x) * (1 + 0.5j * x))
    nrm = phi.norm()
    for _ in range(100):
        a = GroupElement(
            [rng.uniform(-2, 2)],
            [int(rng.integers(-8, 9)) * DX],
            [rng.uniform(0, 2 * np.pi)],
        )
        out = apply_rep(1, a, phi, FAM)
        assert abs(out.norm() - nrm) <= 1e-9 * nrm


def test_apply_rep_homomorphism():
    phi = Field.sample(GX, lambda x: np.exp(-x * x) * (1 + 0.5j * x))
    a = GroupElement([0.7], [4 * DX], [1.1])
    b = GroupElement([-0.4], [-5 * DX], [2.0])
    lhs = apply_rep(1, a, apply_rep(1, b, phi, FAM), FAM)
    rhs = apply_rep(1, multiply(a, b, FAM), phi, FAM)
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-8


def test_apply_rep_support_guard():
    phi = Field.sample(GX, lambda x: np.exp(-x * x / 8))  # wide state
    with pytest.raises(SupportOverflow):
        apply_rep(1, GroupElement([0.0], [24 * DX], [0.0]), phi, FAM)


def test_gaussian_matrix_element_closed_form():
    # <pi_k(q,p,t) Phi_0^k, Phi_0^k> = e^{i k t} e^{-||k|| |(q,p)|^2 / 4};
    # the constant is 1 because Phi_0^k has unit norm
    for k in (1, 2):
        ph = phi_gamma_k([0], float(k), GX)
        a = GroupElement([0.8], [8 * DX], [0.9])
        me = apply_rep(k, a, ph, FAM).inner(ph)
        ref = np.exp(1j * k * a.t[0]) * np.exp(-k * (a.q[0] ** 2 + a.p[0] ** 2) / 4)
        assert abs(me - ref) < 1e-6


def test_matrix_element_symmetry():
    # <phi, pi(a) psi> = conj(<psi, pi(a^{-1}) phi>)
    phi = Field.sample(GX, lambda x: np.exp(-x * x) * (1 + 0.5j * x))
    psi = Field.sample(GX, lambda x: np.exp(-((x - 0.3) ** 2)) * (x + 0.2j))
    a = GroupElement([0.5], [6 * DX], [1.3])
    lhs = matrix_element(1, a, phi, psi, FAM)
    rhs = matrix_element(1, inverse(a), psi, phi, FAM)
    assert abs(lhs - np.conj(rhs)) < 1e-10


def test_rep_matrix_elements_against_single():
    phi = Field.sample(GX, lambda x: np.exp(-x * x) * (1 + 0.5j * x))
    psi = Field.sample(GX, lambda x: np.exp(-((x - 0.3) ** 2)))
    table = rep_matrix_elements(2, phi, psi, FAM, GX, GX)
    iq, ip = 40, 28
    a = GroupElement([GX.nodes(0)[iq]], [GX.nodes(0)[ip]], [0.0])
    direct = apply_rep(2, a, phi, FAM, check_support=False).inner(psi)
    assert abs(table[iq, ip] - direct) < 1e-12


def test_admissibility_constants():
    phi = phi_gamma([0], GX)
    for k in (1, 2, 3):
        c = admissibility_constant(k, phi, FAM)
        ref = (2 * np.pi) ** 2 / k
        assert abs(c - ref) / ref < 1e-5


def test_admissibility_quartic_scaling():
    # the raw integral scales as ||phi||^4; the returned constant divides
    # that out, so scaling phi leaves it unchanged
    phi = phi_gamma([0], GX)
    c1 = admissibility_constant(1, phi, FAM)
    c2 = admissibility_constant(1, phi.with_values(2.0 * phi.values), FAM)
    assert abs(c1 - c2) / c1 < 1e-12


def test_admissibility_truncation_guard():
    wide = Field.sample(GX, lambda x: np.exp(-x * x / 40))
    with pytest.raises(TruncationTooSmall):
        admissibility_constant(1, wide, FAM)


def test_gft_zero_field():
    f = Field.zeros(GG)
    kern = gft(f, 1, FAM, GX)
    assert np.max(np.abs(kern.values)) == 0.0


def test_gft_hs_identity():
    # ||Ff(k)||_HS^2 = (2 pi)^n ||k||^{-n} ||f^k||^2
    f = plancherel_field()
    for k in (-1, 2):
        kern = gft(f, k, FAM, GX)
        fk = f.torus_coeff(k)
        lhs = kern.hs_norm() ** 2
        rhs = (2 * np.pi) / abs(k) * fk.norm() ** 2
        assert abs(lhs - rhs) / rhs < 1e-6


def test_gft_matrix_elements_vs_double_quadrature():
    # <Ff(k) phi, psi> = int f^k(q, p) <pi_k(q, p) phi, psi> dq dp
    f = plancherel_field()
    k = -1
    kern = gft(f, k, FAM, GX)
    phi = Field.sample(GX, lambda x: np.exp(-x * x) * (1 + 0.2j * x))
    psi = Field.sample(GX, lambda x: np.exp(-((x - 0.4) ** 2)))
    lhs = kern.apply(phi).inner(psi)
    fk = f.torus_coeff(k)
    mes = rep_matrix_elements(k, phi, psi, FAM, grid(GG.axes[0]), grid(GG.axes[1]))
    rhs = np.sum(fk.values * mes) * GG.axes[0].weight * GG.axes[1].weight
    assert abs(lhs - rhs) / abs(rhs) < 1e-10


def test_plancherel_identity():
    f = plancherel_field()
    rep = plancherel_gap(f, [-1, 2], FAM, GX)
    assert rep["rel_err"] < 1e-6
    assert abs(rep["rhs"] - 5 * np.pi / 4) < 1e-9  # two Gaussian modes


def test_plancherel_t_independent():
    f = Field.sample(GG, lambda q, p, t: np.exp(-(q ** 2 + p ** 2)) * np.ones_like(t))
    rep = plancherel_gap(f, [-1, 1, 2], FAM, GX)
    assert abs(rep["lhs"]) < 1e-20
    assert abs(rep["rhs"]) < 1e-20


def test_plancherel_augmented_remark():
    f = plancherel_field()
    rep = plancherel_gap(f, [-1, 2], FAM, GX)
    f0 = f.torus_coeff(0)
    lhs = rep["lhs"] + f0.fourier().norm() ** 2
    rhs = f.norm() ** 2 / (2 * np.pi)
    assert abs(lhs - rhs) / rhs < 1e-6


def test_inversion_round_trip_and_trace():
    f = plancherel_field()
    table = {(-1,): gft(f, -1, FAM, GX), (2,): gft(f, 2, FAM, GX)}
    f0 = f.torus_coeff(0)
    rec = invert(table, f0, FAM, GG)
    num = np.sqrt(np.sum(np.abs(rec.values - f.values) ** 2))
    den = np.sqrt(np.sum(np.abs(f.values) ** 2))
    assert num / den < 1e-6
    # tr(pi_k(q,p,t)^* Ff(k)) = (2 pi)^n ||k||^{-n} e^{-i k t} f^k(q, p)
    qg, pg = grid(GG.axes[0]), grid(GG.axes[1])
    tn = [GG.axes[2].nodes]
    for k in (-1, 2):
        tr = trace_pi_star(table[(k,)], k, FAM, qg, pg, tn)
        fk = f.torus_coeff(k)
        ref = (2 * np.pi) / abs(k) * fk.values[:, :, None] * np.exp(-1j * k * tn[0])[None, None, :]
        assert np.max(np.abs(tr - ref)) / np.max(np.abs(ref)) < 1e-6


def test_invert_zero_table():
    f0 = Field.sample(grid(*GG.axes[:2]), lambda q, p: np.exp(-(q ** 2 + p ** 2)))
    rec = invert({}, f0, FAM, GG)
    ref = f0.values[:, :, None] * np.ones(8)[None, None, :]
    assert np.max(np.abs(rec.values - ref)) == 0.0


def test_kernel_op_algebra():
    rng = np.random.default_rng(2)
    k1 = KernelOp(GX, rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64)))
    k2 = k1.adjoint()
    assert np.max(np.abs(k2.values - np.conj(k1.values.T))) == 0.0
    # S2 norm equals the weighted Frobenius norm
    s = k1.singular_values()
    assert abs(np.sqrt(np.sum(s ** 2)) - k1.hs_norm()) < 1e-10 * k1.hs_norm()
    # composition matches matrix product with quadrature weight
    comp = k1.compose(k2)
    ref = k1.matrix() @ k2.matrix() * GX.cell_weight()
    assert np.max(np.abs(comp.matrix() - ref)) < 1e-12


def test_table_serialization(tmp_path):
    f = plancherel_field()
    table = {(-1,): gft(f, -1, FAM, GX), (2,): gft(f, 2, FAM, GX)}
    save_table(table, tmp_path / "ft")
    back = load_table(tmp_path / "ft")
    assert set(back) == {(-1,), (2,)}
    for k in back:
        assert np.array_equal(back[k].values, table[k].values)
