"""Named verification suites and their reports.

Each suite checks one family of identities at desk scale and returns a
Report whose records carry (name, lhs, rhs, rel_err, tolerance, pass).
Identical configuration and seed produce identical records; canonical JSON
emission is byte stable.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import localization as loc
from . import rep_fourier as rf
from . import weyl_g as wg
from . import weyl_k as wk
from .algebra import build_family
from .errors import ConfigInvalid, IoFailure, UnknownSuite
from .fields import Field, Grid, grid, line_axis, torus_axis

SUITE_NAMES = (
    "plancherel",
    "inversion",
    "square-integrability",
    "wigner-k",
    "weyl-product",
    "localization-weyl",
    "localization-product",
    "wclass",
    "moyal",
    "ft-recovery",
    "schatten",
    "unbounded-demo",
)

DEFAULT_TOLERANCES = {
    "plancherel": 1e-6,
    "inversion": 1e-6,
    "square-integrability": 1e-5,
    "wigner-k": 1e-8,
    "weyl-product": 1e-4,
    "localization-weyl": 1e-4,
    "localization-product": 1e-3,
    "wclass": 1e-4,
    "moyal": 1e-4,
    "ft-recovery": 1e-4,
    "schatten": 1e-3,
    "unbounded-demo": 0.5,
}


@dataclass(frozen=True)
class SuiteConfig:
    n: int = 1
    m: int = 1
    preset: str = "hr-1-1"
    grid_n: int = 64
    extent: float = 6.0
    torus_n: int = 8
    kmax: int = 8
    seed: int = 1234
    tolerances: dict = field(default_factory=dict)
    out: str = None

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ConfigInvalid("n and m must be positive")
        if self.grid_n < 4 or self.grid_n % 2:
            raise ConfigInvalid("grid size must be even and at least 4")
        if self.torus_n < 4 or self.torus_n % 2:
            raise ConfigInvalid("torus size must be even and at least 4")
        if self.extent <= 0:
            raise ConfigInvalid("extent must be positive")
        if self.kmax < 1:
            raise ConfigInvalid("kmax must be positive")
        for name, tol in dict(self.tolerances).items():
            if tol <= 0:
                raise ConfigInvalid(f"tolerance for {name} must be positive")

    def tol(self, suite: str) -> float:
        return float(self.tolerances.get(suite, DEFAULT_TOLERANCES[suite]))

    @staticmethod
    def from_json(path) -> "SuiteConfig":
        try:
            data = json.loads(open(path).read())
        except (OSError, ValueError) as exc:
            raise ConfigInvalid(f"cannot read config: {exc}") from exc
        return SuiteConfig(**data)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "preset": self.preset,
            "grid_n": self.grid_n,
            "extent": self.extent,
            "torus_n": self.torus_n,
            "kmax": self.kmax,
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
        }


@dataclass
class CheckRecord:
    name: str
    lhs: float
    rhs: float
    rel_err: float
    tolerance: float
    passed: bool
    extra: dict = field(default_factory=dict)


@dataclass
class Report:
    suite: str
    identity: str  # the verified identity, as a formula string
    records: list
    config: dict
    wall_time_s: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)


def _record(name, lhs, rhs, rel_err, tol, extra=None) -> CheckRecord:
    return CheckRecord(
        name=name,
        lhs=float(np.real_if_close(lhs)) if not isinstance(lhs, str) else lhs,
        rhs=float(np.real_if_close(rhs)) if not isinstance(rhs, str) else rhs,
        rel_err=float(rel_err),
        tolerance=float(tol),
        passed=bool(rel_err <= tol),
        extra=extra or {},
    )


def _require_nm(config: SuiteConfig, n: int, m: int, suite: str):
    if config.n != n or config.m != m:
        raise ConfigInvalid(f"suite {suite!r} is implemented for n={n}, m={m}")


# ----------------------------------------------------------------------
# canonical test data
# ----------------------------------------------------------------------
def _standard_grids(config: SuiteConfig):
    gx = grid(line_axis(config.extent, config.grid_n))
    g2 = grid(line_axis(config.extent, config.grid_n), line_axis(config.extent, config.grid_n))
    gG = grid(
        line_axis(config.extent, config.grid_n),
        line_axis(config.extent, config.grid_n),
        torus_axis(config.torus_n),
    )
    return gx, g2, gG


def _plancherel_field(gG: Grid) -> Field:
    return Field.sample(
        gG, lambda q, p, t: np.exp(-(q ** 2 + p ** 2) / 2) * (np.exp(1j * t) + 0.5 * np.exp(-2j * t))
    )


# ----------------------------------------------------------------------
# the suites
# ----------------------------------------------------------------------
def _suite_plancherel(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "plancherel")
    fam = build_family(config.n, config.m)
    gx, g2, gG = _standard_grids(config)
    f = _plancherel_field(gG)
    tol = config.tol("plancherel")
    rep = rf.plancherel_gap(f, [(-1,), (2,)], fam, gx)
    recs = [_record("sum_k ||Ff(k)||_HS^2 alpha(k) = ||f - f^0||^2_mu", rep["lhs"], rep["rhs"], rep["rel_err"], tol)]
    # augmented form: adding ||(f^0)^hat||^2 recovers the full norm
    f0 = f.torus_coeff((0,))
    aug_lhs = rep["lhs"] + f0.fourier().norm() ** 2
    full = f.norm() ** 2 / (2.0 * np.pi)
    rel = abs(aug_lhs - full) / max(abs(full), 1e-300)
    recs.append(_record("augmented sum + ||f^0hat||^2 = ||f||^2_mu", aug_lhs, full, rel, tol))
    return recs


def _suite_inversion(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "inversion")
    fam = build_family(config.n, config.m)
    gx, g2, gG = _standard_grids(config)
    f = _plancherel_field(gG)
    tol = config.tol("inversion")
    table = {(-1,): rf.gft(f, (-1,), fam, gx), (2,): rf.gft(f, (2,), fam, gx)}
    f0 = f.torus_coeff((0,))
    frec = rf.invert(table, f0, fam, gG)
    num = np.sqrt(np.sum(np.abs(frec.values - f.values) ** 2))
    den = np.sqrt(np.sum(np.abs(f.values) ** 2))
    recs = [_record("f = sum_k tr(pi_k^* Ff(k)) alpha(k) + f^0", den, den, float(num / den), tol)]
    # trace identity per k
    qg = grid(gG.axes[0])
    pg = grid(gG.axes[1])
    tn = [gG.axes[2].nodes]
    for k in (-1, 2):
        tr = rf.trace_pi_star(table[(k,)], (k,), fam, qg, pg, tn)
        fk = f.torus_coeff((k,))
        ref = (2.0 * np.pi) / abs(k) * fk.values[:, :, None] * np.exp(-1j * k * tn[0])[None, None, :]
        err = np.max(np.abs(tr - ref)) / max(np.max(np.abs(ref)), 1e-300)
        recs.append(_record(f"trace identity k={k}", float(np.max(np.abs(tr))), float(np.max(np.abs(ref))), float(err), tol))
    return recs


def _suite_square_integrability(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "square-integrability")
    from .specials import phi_gamma

    fam = build_family(config.n, config.m)
    gx, _, _ = _standard_grids(config)
    phi = phi_gamma([0] * config.n, gx)
    tol = config.tol("square-integrability")
    recs = []
    for k in (1, 2, 3):
        c = rf.admissibility_constant((k,), phi, fam)
        ref = (2.0 * np.pi) ** (config.m + config.n) / abs(k) ** config.n
        recs.append(_record(f"int_G |<phi, pi_k phi>|^2 = |det B_k|^-1 (2pi)^(m+n), k={k}", c, ref, abs(c - ref) / ref, tol))
    return recs


def _suite_wigner_k(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "wigner-k")
    fam = build_family(config.n, config.m)
    gx, g2, _ = _standard_grids(config)
    tol = config.tol("wigner-k")
    phi = loc.gaussian_wavelet(gx)
    recs = []
    for k in (1, 2):
        V = wk.fourier_wigner_k(phi, phi, (k,), fam, g2)
        qn = g2.nodes(0)
        pn = g2.nodes(1)
        ref = np.exp(-pn[None, :] ** 2 / 4 - k ** 2 * qn[:, None] ** 2 / 4)
        err = float(np.max(np.abs(V.values - ref)))
        recs.append(_record(f"V_k(phi,phi) = exp(-|p|^2/4 - ||k||^2 |q|^2/4), k={k}", float(np.max(np.abs(V.values))), 1.0, err, tol))
    return recs


def _suite_weyl_product(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "weyl-product")
    fam = build_family(config.n, config.m)
    gx, g2, _ = _standard_grids(config)
    tol = config.tol("weyl-product")
    f = Field.sample(gx, lambda x: np.exp(-(x - 0.4) ** 2) * (1 + 0.3j * x))
    sigma = Field.sample(g2, lambda x, xi: np.exp(-(x ** 2 + xi ** 2) / 2) * (1 + 0.2 * x))
    tau = Field.sample(g2, lambda x, xi: np.exp(-((x - 0.2) ** 2 + xi ** 2) / 2))
    recs = []
    for k in (1, 2):
        rep = wk.weyl_product_gap(sigma, tau, (k,), f, fam)
        recs.append(
            _record(
                f"W_sigma W_tau = W_gamma, gammahat = (2pi)^-n sigmahat *_k tauhat, k={k}",
                rep["lhs_norm"],
                rep["rhs_norm"],
                rep["rel_gap"],
                tol,
            )
        )
    return recs


def _suite_localization_weyl(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "localization-weyl")
    fam = build_family(config.n, config.m)
    gx, g2, _ = _standard_grids(config)
    tol = config.tol("localization-weyl")
    wav = loc.WaveletConfig.default(gx, config.m)
    f = Field.sample(gx, lambda x: np.exp(-(x - 0.4) ** 2) * (1 + 0.3j * x))
    F = Field.sample(g2, lambda q, p: np.exp(-(q ** 2 + p ** 2) / 2) * (1 + 0.1 * q))
    recs = []
    for k in (1, 2):
        rep = loc.loc_as_weyl_gap(F, (k,), f, fam, wav)
        recs.append(
            _record(
                f"L_F = W_sigma with sigmahat = (2pi)^(n/2) Fhat^k Lambdahat^k, k={k}",
                rep["lhs_norm"],
                rep["rhs_norm"],
                rep["rel_gap"],
                tol,
            )
        )
    # resolution of identity with the resolved constant
    g2w = grid(line_axis(config.extent * 1.25, int(config.grid_n * 1.25)), line_axis(config.extent * 1.25, int(config.grid_n * 1.25)))
    frec = loc.identity_reconstruction((1,), f, fam, wav, g2w)
    num = np.sqrt(np.sum(np.abs(frec.values - f.values) ** 2))
    den = np.sqrt(np.sum(np.abs(f.values) ** 2))
    recs.append(_record("resolution of identity (F == 1)", frec.norm(), f.norm(), float(num / den), tol))
    return recs


def _suite_localization_product(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "localization-product")
    fam = build_family(config.n, config.m)
    gx, g2, _ = _standard_grids(config)
    tol = config.tol("localization-product")
    wav = loc.WaveletConfig.default(gx, config.m)
    f = Field.sample(gx, lambda x: np.exp(-(x - 0.4) ** 2) * (1 + 0.3j * x))
    F = Field.sample(g2, lambda q, p: np.exp(-(q ** 2 + p ** 2) / 2))
    G = Field.sample(g2, lambda q, p: np.exp(-((q - 0.3) ** 2 + (p + 0.2) ** 2) / 2))
    rep = loc.product_symbol_gap(F, G, (1,), f, fam, wav)
    recs = [
        _record(
            "L_F L_G = L_H with Hhat^k = (2pi)^(-n/2) (Fhat^k (*) Ghat^k), k=1",
            rep["lhs_norm"],
            rep["rhs_norm"],
            rep["rel_gap"],
            tol,
        )
    ]
    # noncommutativity witness: swapping F and G moves the product
    repswap = loc.product_symbol_gap(G, F, (1,), f, fam, wav)
    lhs1 = loc.localize(F, (1,), loc.localize(G, (1,), f, fam, wav), fam, wav)
    lhs2 = loc.localize(G, (1,), loc.localize(F, (1,), f, fam, wav), fam, wav)
    diff = np.sqrt(np.sum(np.abs(lhs1.values - lhs2.values) ** 2)) / np.sqrt(np.sum(np.abs(f.values) ** 2))
    recs.append(
        CheckRecord(
            name="noncommutativity witness ||L_F L_G f - L_G L_F f|| / ||f|| > 1e-2",
            lhs=float(diff),
            rhs=1e-2,
            rel_err=float(diff),
            tolerance=float(repswap["rel_gap"] + 1),  # informational tolerance
            passed=bool(diff > 1e-2),
        )
    )
    return recs


def _suite_wclass(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "wclass")
    fam = build_family(config.n, config.m)
    tol = config.tol("wclass")
    # counterexample on a wide lattice: shape and non-integrability
    npts = int(config.grid_n * 1.5)
    g2l = grid(line_axis(config.extent * 1.5, npts), line_axis(config.extent * 1.5, npts))
    Fh = Field.sample(g2l, lambda q, p: np.exp((q ** 2 + p ** 2) / 4))
    Gh = Field.sample(g2l, lambda q, p: np.exp(-(q ** 2) / 2))
    out = loc.new_conv(Fh, Gh, (1,), fam)
    pn = g2l.nodes(1)
    i0 = npts // 2
    vals = out.values[i0, :]
    ratio = np.abs(vals) / np.abs(vals[i0])
    ref = np.exp(pn ** 2 / 6)
    sel = np.abs(pn) <= 2.5
    err = float(np.max(np.abs(ratio[sel] - ref[sel]) / ref[sel]))
    recs = [_record("counterexample shape (Fhat (*) Ghat)(0, eta) ~ C e^{|eta|^2/6}", float(np.abs(vals[i0])), 4 * np.pi / np.sqrt(3), err, tol)]
    ladder = loc.wclass_ladder(out, 0.0, (1,), fam)
    recs.append(
        CheckRecord(
            name="counterexample fails the L2 subgrid ladder",
            lhs=ladder.witness_norms[-1],
            rhs=ladder.witness_norms[0],
            rel_err=0.0 if ladder.verdict == "nonmember" else 1.0,
            tolerance=0.5,
            passed=ladder.verdict == "nonmember",
            extra={"verdict": ladder.verdict},
        )
    )
    # membership ladder on an analytic member and the product theorem shadow
    g2 = grid(line_axis(config.extent, config.grid_n), line_axis(config.extent, config.grid_n))
    Fm = Field.sample(g2, lambda q, p: np.exp(-1.5 * (q ** 2 + p ** 2)))
    Gm = Field.sample(g2, lambda q, p: np.exp(-1.5 * ((q - 0.1) ** 2 + p ** 2)))
    c = 1.2
    eps = 0.6
    ce = loc.c_epsilon(c, eps)
    verdicts = {"inputs": (loc.wclass_ladder(Fm, c, (1,), fam).verdict, loc.wclass_ladder(Gm, c, (1,), fam).verdict)}
    conv = loc.new_conv(Fm, Gm, (1,), fam)
    Hhk = conv.with_values(conv.values * (2 * np.pi) ** -0.5)
    ok = True
    for d in (0.05, 0.5 * ce, ce):
        v = loc.wclass_ladder(Hhk, d, (1,), fam).verdict
        verdicts[f"d={d:.3f}"] = v
        ok = ok and v == "member"
    ok = ok and verdicts["inputs"] == ("member", "member")
    recs.append(
        CheckRecord(
            name=f"product symbol in W_d for d <= c_eps = {ce:.3f} (c = {c}, eps = {eps})",
            lhs=float(ce),
            rhs=float(ce),
            rel_err=0.0 if ok else 1.0,
            tolerance=0.5,
            passed=ok,
            extra=verdicts,
        )
    )
    return recs


def _suite_moyal(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "moyal")
    fam = build_family(config.n, config.m)
    tol = config.tol("moyal")
    gG = grid(line_axis(5.0, 20), line_axis(5.0, 20), torus_axis(6))
    gx = grid(line_axis(6.0, 24))
    f1 = Field.sample(gG, lambda q, p, t: np.exp(-(q ** 2 + p ** 2) / 2) * (np.exp(1j * t) + 0.5 * np.exp(-1j * t)))
    g1 = Field.sample(gG, lambda q, p, t: np.exp(-((q - 0.3) ** 2 + p ** 2) / 2) * (1 + 0j))
    f2 = Field.sample(gG, lambda q, p, t: np.exp(-(q ** 2 + (p - 0.2) ** 2) / 2) * (0.7 * np.exp(1j * t) + 0.3j * np.exp(-1j * t)))
    g2_ = Field.sample(gG, lambda q, p, t: np.exp(-(q ** 2 + p ** 2)) * (1 + 0j))
    rep = wg.moyal_gap(f1, g1, f2, g2_, [(-1,), (1,)], fam, gx)
    return [
        _record(
            "<V(f1,g1), V(f2,g2)>_{mu x alpha} = <f1 - f1^0, f2 - f2^0><g1, g2>",
            abs(rep["lhs"]),
            abs(rep["rhs"]),
            rep["rel_err"],
            tol,
        )
    ]


def _suite_ft_recovery(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "ft-recovery")
    fam = build_family(config.n, config.m)
    tol = config.tol("ft-recovery")
    gG = grid(line_axis(5.0, 20), line_axis(5.0, 20), torus_axis(6))
    gx = grid(line_axis(6.0, 24))
    gI = grid(line_axis(9.0, 36), line_axis(9.0, 36), torus_axis(6))
    f = Field.sample(gG, lambda q, p, t: np.exp(-(q ** 2 + p ** 2) / 2) * (np.exp(1j * t) + 0.5 * np.exp(-1j * t)))
    g = Field.sample(gG, lambda q, p, t: np.exp(-((q - 0.3) ** 2 + p ** 2) / 2) * (1 + 0j))
    rec = wg.ft_recovery_gap(f, g, [(-1,), (1,)], fam, gx, integration_grid=gI)
    recs = [_record("Ff(k) = C^{-1} int_G V(f, g)(., k) dmu", 1.0, 1.0, rec["max_rel_err"], tol)]
    inv = wg.wigner_inversion(f, g, [(-1,), (1,)], fam, gx, integration_grid=gI)
    recs.append(_record("f - f^0 = C^{-1} sum_k tr[pi_k^* int V dmu] alpha(k)", 1.0, 1.0, inv["rel_err"], tol))
    return recs


def _suite_schatten(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "schatten")
    from .rep_fourier import KernelOp
    from .specials import phi_gamma

    fam = build_family(config.n, config.m)
    tol = config.tol("schatten")
    # G lattice spacing 0.5 resolves the k = 2 trace factors (width ~ 1/k)
    # and the box must hold the translated symbol supports; the kernel
    # spacing 0.25 keeps the trace phases alias free for k <= 2
    gG = grid(line_axis(6.0, 24), line_axis(6.0, 24), torus_axis(4))
    gx = grid(line_axis(6.0, 48))
    rng = np.random.default_rng(config.seed)
    # keep the operator parts within degree 1: the degree-2 trace factors
    # carry Laguerre polynomials that have not decayed at the G box edge
    # for k = 1, which breaks the discrete S2 identity at the 1e-3 level
    basis = [phi_gamma([j], gx) for j in range(2)]
    recs = []
    for trial in range(10):
        kslot = int(rng.integers(1, 3))
        c0, c1 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        # widths the desk-scale box resolves: the translated-symbol tails
        # must clear the G box for the discrete S2 identity to close
        width = float(rng.uniform(0.7, 1.05))
        off = float(rng.uniform(-0.5, 0.5))
        s = Field.sample(
            gG,
            lambda q, p, t: np.exp(-((q - off) ** 2 + p ** 2) / (2 * width ** 2))
            * (1.0 + 0.3 * c1 * np.exp(1j * t)),
        )
        i, j = rng.integers(0, 2, size=2)
        T = KernelOp.rank_one(basis[i], basis[j]) + 0.5 * c0 * KernelOp.rank_one(basis[0], basis[0])
        sym = wg.OperatorSymbolG.from_separable(s, {(kslot,): T}, gx, fam)
        K, wts = wg.weyl_G_kernel(sym, fam)
        rep = wg.schatten_report(K, wts)
        n2 = wg.mixed_norm(sym, 2.0)
        rel = abs(rep["s2"] ** 2 - n2 ** 2) / n2 ** 2
        recs.append(_record(f"S2 equality trial {trial} (k={kslot})", rep["s2"] ** 2, n2 ** 2, rel, tol))
        n1 = wg.mixed_norm(sym, 1.0)
        bound = 2.0 ** (-2 * config.n - config.m) * n1
        viol = max(0.0, rep["s1"] / bound - 1.0)
        recs.append(
            CheckRecord(
                name=f"S1 bound ||W||_S1 <= 2^(-2n-m) ||sigma||_1, trial {trial}",
                lhs=rep["s1"],
                rhs=bound,
                rel_err=viol,
                tolerance=0.0,
                passed=bool(rep["s1"] <= bound * (1 + 1e-9)),
            )
        )
        # the diagonal integral does satisfy the doubling bound with 2^(-2n)
        diag = wg.diagonal_l1(sym, fam)
        dbound = 2.0 ** (-2 * config.n) * n1
        recs.append(
            CheckRecord(
                name=f"diagonal integral <= 2^(-2n) ||sigma||_1, trial {trial}",
                lhs=diag,
                rhs=dbound,
                rel_err=max(0.0, diag / dbound - 1.0),
                tolerance=1e-9,
                passed=bool(diag <= dbound * (1 + 1e-9)),
            )
        )
    return recs


def _suite_unbounded(config: SuiteConfig) -> list:
    _require_nm(config, 1, 1, "unbounded-demo")
    fam = build_family(config.n, config.m)
    rprime = 4.0 / 3.0
    alpha_div = 1.0 / rprime - 1.0
    alpha_conv = alpha_div + 0.2
    div = wg.divergence_partial_sums(alpha_div, rprime, 64, fam)
    inc = wg.doubling_increments(div["S"], (8, 16, 32, 64))
    first = inc[0]
    recs = [
        CheckRecord(
            name=f"S(K) strictly increasing (alpha = {alpha_div:.4f}, r' = 4/3)",
            lhs=float(div["S"][-1]),
            rhs=float(div["S"][0]),
            rel_err=0.0 if div["increasing"] else 1.0,
            tolerance=0.5,
            passed=bool(div["increasing"]),
            extra={"log_slope": div["log_slope"], "log_fit_r2": div["log_fit_r2"]},
        )
    ]
    ok = all(x >= 0.5 * first for x in inc)
    recs.append(
        CheckRecord(
            name="divergent regime: S(2K) - S(K) stays above 50% of its first value",
            lhs=float(min(inc) / first),
            rhs=0.5,
            rel_err=0.0 if ok else 1.0,
            tolerance=0.5,
            passed=bool(ok),
            extra={"increments": inc},
        )
    )
    conv = wg.divergence_partial_sums(alpha_conv, rprime, 64, fam)
    inc2 = wg.doubling_increments(conv["S"], (8, 16, 32, 64))
    ratios = [inc2[i + 1] / inc2[i] for i in range(len(inc2) - 1)]
    ok2 = all(r < 0.9 for r in ratios)
    recs.append(
        CheckRecord(
            name=f"convergent regime (alpha = {alpha_conv:.4f}): increments decay geometrically",
            lhs=float(max(ratios)),
            rhs=0.9,
            rel_err=0.0 if ok2 else 1.0,
            tolerance=0.5,
            passed=bool(ok2),
            extra={"increments": inc2, "ratios": ratios},
        )
    )
    # table rows for the CSV export: K, S(K), increment, running log-fit slope
    S = div["S"]
    Ks = div["K"]
    for K in (8, 16, 32, 64):
        inc_k = float(S[K - 1] - S[K // 2 - 1])
        sel = Ks <= K
        A = np.vstack([np.log(Ks[sel].astype(float)), np.ones(int(sel.sum()))]).T
        coef, *_ = np.linalg.lstsq(A, S[sel], rcond=None)
        recs.append(
            CheckRecord(
                name=f"S({K})",
                lhs=float(S[K - 1]),
                rhs=inc_k,
                rel_err=0.0,
                tolerance=1.0,
                passed=True,
                extra={"K": K, "S": float(S[K - 1]), "increment": inc_k, "log_fit_slope": float(coef[0])},
            )
        )
    return recs


_SUITES = {
    "plancherel": (_suite_plancherel, "sum_k ||Ff(k)||_HS^2 (2pi)^-n ||k||^n = ||f - f^0||^2"),
    "inversion": (_suite_inversion, "f = sum_k tr(pi_k(q,p,t)^* Ff(k)) (2pi)^-n ||k||^n + f^0"),
    "square-integrability": (
        _suite_square_integrability,
        "int_G |<phi, pi_k phi>|^2 dq dp dt = |det B_k|^-1 (2pi)^(m+n) ||phi||^4",
    ),
    "wigner-k": (_suite_wigner_k, "V_k(phi, phi)(-q, -p) = exp(-|p|^2/4 - ||k||^2 |q|^2 / 4)"),
    "weyl-product": (_suite_weyl_product, "W_sigma^k W_tau^k = W_gamma^k, gammahat = (2pi)^-n sigmahat *_k tauhat"),
    "localization-weyl": (_suite_localization_weyl, "L_F^k = W_sigma^k, sigma = (2pi)^(-n/2) F^k * Lambda^k"),
    "localization-product": (
        _suite_localization_product,
        "L_F L_G = L_H, Hhat^k = (2pi)^(-n/2) (Fhat^k (*) Ghat^k)",
    ),
    "wclass": (_suite_wclass, "decay class membership of symbols under the product convolution"),
    "moyal": (_suite_moyal, "<V(f1,g1), V(f2,g2)>_{mu x alpha} = <f1-f1^0, f2-f2^0><g1, g2>"),
    "ft-recovery": (_suite_ft_recovery, "Ff(k) = C^-1 int_G V(f, g)(., k) dmu"),
    "schatten": (_suite_schatten, "||W_sigma||_S2^2 = ||sigma||_{2, mu x alpha}^2 and the S1 bound"),
    "unbounded-demo": (_suite_unbounded, "divergence of sum_k |<Ff_a(k) Phi_0^k, Phi_0^k>|^r' alpha(k)"),
}


def run_suite(name: str, config: SuiteConfig = None) -> Report:
    if name not in _SUITES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    config = config or SuiteConfig()
    fn, identity = _SUITES[name]
    t0 = time.perf_counter()
    records = fn(config)
    wall = time.perf_counter() - t0
    return Report(suite=name, identity=identity, records=records, config=config.as_dict(), wall_time_s=wall)


# ----------------------------------------------------------------------
# report emission
# ----------------------------------------------------------------------
def report_to_dict(report: Report, canonical: bool = True) -> dict:
    return {
        "schema": 1,
        "suite": report.suite,
        "identity": report.identity,
        "passed": report.passed,
        "config": report.config,
        "wall_time_s": None if canonical else report.wall_time_s,
        "records": [
            {
                "name": r.name,
                "lhs": r.lhs,
                "rhs": r.rhs,
                "rel_err": r.rel_err,
                "tolerance": r.tolerance,
                "pass": r.passed,
                "extra": r.extra,
            }
            for r in report.records
        ],
    }


def emit_report(report: Report, path, fmt: str = "json", canonical: bool = True) -> None:
    """Write the report; canonical output is byte stable for a fixed config
    and seed (the wall time is omitted then)."""
    try:
        if fmt == "json":
            text = json.dumps(report_to_dict(report, canonical), sort_keys=True, indent=1) + "\n"
            with open(path, "w") as fh:
                fh.write(text)
        elif fmt == "csv":
            buf = io.StringIO()
            if report.suite == "unbounded-demo":
                writer = csv.writer(buf, lineterminator="\n")
                writer.writerow(["K", "S", "increment", "log_fit_slope"])
                for r in report.records:
                    if "K" in r.extra:
                        writer.writerow([r.extra["K"], repr(r.extra["S"]), repr(r.extra["increment"]), repr(r.extra["log_fit_slope"])])
            else:
                writer = csv.writer(buf, lineterminator="\n")
                writer.writerow(["name", "lhs", "rhs", "rel_err", "tolerance", "pass"])
                for r in report.records:
                    writer.writerow([r.name, repr(r.lhs), repr(r.rhs), repr(r.rel_err), repr(r.tolerance), r.passed])
            with open(path, "w") as fh:
                fh.write(buf.getvalue())
        else:
            raise IoFailure(f"unknown format {fmt!r}")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
