"""Command-line driver: ``hlqg <group> <action> [options]``.

Exit status is 0 when every check passes, 1 when some check fails and 2 on
usage, parse or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from fractions import Fraction

import numpy as np

from . import heisen, hlrep, hopf, kernels, slpoly, zcalc
from .config import ConfigError, RunConfig, load_config
from .parser import ParseError, parse
from .report import Check, Report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from exc


def _pick(value, default):
    return default if value is None else value


# ---------------------------------------------------------------- hopf / nf

def cmd_hopf_verify(args, cfg: RunConfig, out) -> Report:
    s_value = Fraction(args.s) if args.s is not None else cfg.symbolic.s_value
    rep = hopf.check_hopf_axioms(_pick(args.random, cfg.symbolic.n_random),
                                 _pick(args.seed, cfg.symbolic.seed), s_value)
    report = Report(cfg)
    for c in rep.checks:
        report.add(Check.exact(f"hopf/{c.group}/{c.name}", f"Hopf *-algebra axioms: {c.group}",
                               c.passed, None if c.passed else c.residual))
    return report


def cmd_nf(args, cfg: RunConfig, out) -> Report:
    v = parse(args.expr)
    if args.s is not None:
        if not hasattr(v, "subs_s"):
            raise UsageError("--s applies to single-leg expressions only")
        v = v.subs_s(Fraction(args.s))
    print(v.to_str(), file=out)
    return Report(cfg)


# ---------------------------------------------------------------- rep

def _thresholds(cfg: RunConfig) -> hlrep.Thresholds:
    return hlrep.Thresholds(cfg.tolerances.exact, cfg.tolerances.truncation)


def _rep_params(args, cfg: RunConfig):
    return (_pick(args.c, cfg.numeric.c), _pick(args.s, cfg.numeric.s),
            _pick(args.N, cfg.numeric.N), _pick(args.P, cfg.numeric.P))


def _build_case(args, cfg: RunConfig) -> hlrep.HLQuadruple:
    c, s, N, P = _rep_params(args, cfg)
    case = args.case
    if case == "gamma_invertible":
        return hlrep.build_invertible_gamma(c, s, N, P)
    if case == "gamma_zero":
        return hlrep.build_zero_gamma(c, s, N, P)
    if case == "direct_sum":
        c0 = 2 * c if abs(abs(c) - 1) < 1e-12 else c
        return hlrep.direct_sum(hlrep.build_zero_gamma(c0, s, N, P), hlrep.build_invertible_gamma(c, s, N, P))
    raise UsageError(f"unknown case {case}")


def _relation_checks(report: Report, rr: hlrep.RelationReport, prefix: str) -> None:
    for e in rr.entries:
        report.add(Check.measured(f"{prefix}/{e.name}[{e.classification}]",
                                  "generator relations on a representation", e.residual, e.threshold))


def cmd_rep_build(args, cfg, out) -> Report:
    q = _build_case(args, cfg)
    report = Report(cfg)
    report.add(Check.measured(f"rep/{q.case}/normality of C", "c is normal",
                              hlrep.normality_defect(q), cfg.tolerances.exact))
    print(f"case={q.case} dim={q.dim} probe={q.P}", file=sys.stderr)
    return report


def cmd_rep_check(args, cfg, out) -> Report:
    q = _build_case(args, cfg)
    report = Report(cfg)
    _relation_checks(report, hlrep.check_relations(q, _thresholds(cfg)), f"rep/{q.case}")
    return report


def cmd_rep_tensor(args, cfg, out) -> Report:
    c, s, N, P = _rep_params(args, cfg)
    c2 = _pick(args.c2, c)
    q = hlrep.tensor(hlrep.build_invertible_gamma(c, s, N, P), hlrep.build_invertible_gamma(c2, s, N, P))
    report = Report(cfg)
    _relation_checks(report, hlrep.check_relations(q, _thresholds(cfg)), "rep/tensor")
    # classical limit: the construction is matrix multiplication
    g1 = (2.0, 1.0 + 1j, 1.0, (1 + (1 + 1j)) / 2.0)
    g2 = (1.0, -0.5, 3j, 1 - 1.5j)
    p1, p2 = hlrep.classical_point(*g1), hlrep.classical_point(*g2)
    prod = hlrep.classical_matrix(hlrep.tensor(p1, p2))
    ref = hlrep.classical_matrix(p1) @ hlrep.classical_matrix(p2)
    report.add(Check.measured("rep/tensor/classical product", "comultiplication on generators at s=0",
                              float(np.max(np.abs(prod - ref))), 0.0))
    return report


def _tensor_pair(args, cfg):
    c, s, N, P = _rep_params(args, cfg)
    c2 = _pick(args.c2, c)
    return hlrep.tensor(hlrep.build_invertible_gamma(c, s, N, P), hlrep.build_invertible_gamma(c2, s, N, P))


def cmd_rep_shift(args, cfg, out) -> Report:
    q2 = _tensor_pair(args, cfg)
    res = hlrep.check_shift_identity(q2, args.z)
    report = Report(cfg)
    report.add(Check.measured(f"rep/shift z={args.z}", "shift identity for the tensor c-generator",
                              res.residual, cfg.tolerances.shift))
    print(f"kappa={res.kappa:.6g} literal_residual={res.residual_literal:.3e}", file=sys.stderr)
    return report


def cmd_rep_sumt(args, cfg, out) -> Report:
    c, s, N, P = _rep_params(args, cfg)
    q = hlrep.build_invertible_gamma(c, s, N, P)
    report = Report(cfg)
    report.add(Check.measured("rep/star-sum", "a*a + d*d = aa* + dd*",
                              hlrep.check_star_sum_identity(q), cfg.tolerances.exact))
    report.add(Check.measured(f"rep/sumt[{args.form}]", "expansion of (1 + T*T) e^{-a*a - d*d}",
                              hlrep.check_sumt_expansion(q, args.form), cfg.tolerances.sumt))
    return report


def cmd_rep_asa1(args, cfg, out) -> Report:
    c, s, N, P = _rep_params(args, cfg)
    q = hlrep.build_invertible_gamma(c, s, N, P)
    report = Report(cfg)
    report.add(Check.measured("rep/asa1", "heat smearing of e^{-a*a} e^{-d*d}",
                              hlrep.check_asa1_smearing(q), cfg.tolerances.heat))
    return report


# ---------------------------------------------------------------- heat

def _heat_rep(args, cfg):
    lam = _pick(args.lam, cfg.numeric.lam)
    N = _pick(args.N, 40)
    return heisen.build_irrep(lam, 0.0, N, cfg.numeric.s), _pick(args.P, N // 2)


def _heat_diag(r: heisen.TruncRep, t: float, P: int) -> np.ndarray:
    """exp(-t a*a) on the low block from the ladder spectrum: a*a e_n = |lam| n' e_n."""
    n = np.arange(P)
    occ = n + 1 if r.lam > 0 else n
    return np.diag(np.exp(-t * abs(r.lam) * occ))


def _quad(cfg, r, t):
    q = cfg.quadrature
    if q.R > 0:
        return heisen.QuadSpec(q.R, q.n_r, q.n_theta)
    return heisen.auto_heat_quad(r, t, q.n_r, q.n_theta)


def cmd_heat(args, cfg, out) -> Report:
    r, P = _heat_rep(args, cfg)
    report = Report(cfg)
    for t in args.t:
        if args.action == "direct":
            X = heisen.heat_direct(r, t)
            res = heisen.opnorm(heisen.compress(X, P) - _heat_diag(r, t, P))
            report.add(Check.measured(f"heat/direct t={t}", "heat semigroup from the spectrum", res,
                                      cfg.tolerances.exact))
        elif args.action == "smeared":
            X = heisen.heat_smeared(r, t, _quad(cfg, r, t))
            ref = _heat_diag(r, t, P)
            res = heisen.opnorm(heisen.compress(X, P) - ref) / heisen.opnorm(ref)
            report.add(Check.measured(f"heat/smeared t={t}", "heat smearing of displacements", res,
                                      cfg.tolerances.heat))
        else:
            res = heisen.heat_compare(r, t, _quad(cfg, r, t), P)
            report.add(Check.measured(f"heat/compare t={t}", "heat smearing of displacements", res,
                                      cfg.tolerances.heat))
    return report


# ---------------------------------------------------------------- kernel

def _csv(rows: list[dict], out) -> None:
    if not rows:
        return
    keys: list[str] = []
    for r in rows:
        keys += [k for k in r if k not in keys]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    out.write(buf.getvalue())


def cmd_kernel(args, cfg, out) -> Report:
    report = Report(cfg)
    tol = cfg.tolerances.kernel
    s = _pick(args.s, cfg.numeric.s)
    rows = []
    if args.action == "psi":
        z, zp = args.z, args.zp
        v = kernels.psi(z, zp, s)
        rows.append(kernels.KernelEval("psi", {"z": z, "zp": zp, "s": s}, v).row())
        report.add(Check.measured("kernel/psi unit modulus", "skew bicharacter", abs(abs(v) - 1), 1e-14))
        report.add(Check.measured("kernel/psi skew", "skew bicharacter",
                                  abs(v * kernels.psi(zp, z, s) - 1), 1e-14))
    elif args.action == "htilde":
        for w in args.w:
            e = kernels.h_tilde(w, s)
            exact = kernels.h_tilde_exact(w, s)
            row = e.row()
            row["closed_form"] = exact
            rows.append(row)
            report.add(Check.measured(f"kernel/htilde w={w}", "radial transform vs Bessel closed form",
                                      abs(e.value - exact) / (math.pi * s * s), tol))
    elif args.action == "l":
        e = kernels.l_kernel(args.w1, args.w2, s)
        rows.append(e.row())
        if args.direct and s != 0:
            d = kernels.l_kernel_direct(args.w1, args.w2, s)
            rows.append(d.row())
            report.add(Check.measured("kernel/l nested vs direct", "two-point kernel",
                                      abs(e.value - d.value) / abs(d.value), tol))
        report.add(Check.measured("kernel/l refinement", "two-point kernel", e.error / max(abs(e.value), 1e-300), tol))
    elif args.action == "fgen":
        r = kernels.f_gen_smeared(args.alpha, args.gamma, args.delta, s)
        rows.append(kernels.KernelEval("f_gen", {"alpha": args.alpha, "gamma": args.gamma, "delta": args.delta,
                                                 "s": s}, r.closed).row())
        rows.append(kernels.KernelEval("f_gen", {"alpha": args.alpha, "gamma": args.gamma, "delta": args.delta,
                                                 "s": s}, r.value, r.error, "quadrature").row())
        report.add(Check.measured("kernel/fgen closed vs smeared", "generating function smearing",
                                  r.rel_error, cfg.tolerances.asa1))
    elif args.action == "gw":
        trials = kernels.gw_trials(args.trials, args.seed)
        for k, t in enumerate(trials):
            rows.append({"trial": k, "u": t.u.to_str(), "v": t.v.to_str(), "w": t.w.to_str(),
                         "holds": t.holds, "det_lhs": t.det_lhs.to_str(), "det_rhs": t.det_rhs.to_str()})
        report.add(Check.exact(f"kernel/gw {args.trials} trials", "shear factorization of the Weyl element",
                               all(t.holds for t in trials)))
        report.add(Check.exact("kernel/gw determinants", "shear factorization of the Weyl element",
                               all(t.det_lhs == 1 and t.det_rhs == 1 for t in trials)))
    _csv(rows, out)
    return report


# ---------------------------------------------------------------- zcalc

def _normal_pair(rng, n: int, scale: float):
    U, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    d1 = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    d2 = scale * (rng.normal(size=n) + 1j * rng.normal(size=n))
    return U @ np.diag(d1) @ U.conj().T, U @ np.diag(d2) @ U.conj().T


def cmd_zcalc(args, cfg, out) -> Report:
    report = Report(cfg)
    tol = cfg.tolerances.zcalc
    rng = np.random.default_rng(_pick(args.seed, cfg.numeric.seed))
    n = args.n
    if args.action == "roundtrip":
        worst = 0.0
        for _ in range(args.trials):
            T = args.scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
            worst = max(worst, zcalc.roundtrip_error(T))
        report.add(Check.measured("zcalc/roundtrip", "z-transform inverse", worst, tol))
    elif args.action == "commute":
        T1, T2 = _normal_pair(rng, n, args.scale)
        L = heisen.lowering(n)
        H = T1 + T1.conj().T
        Zn = np.zeros((n, n))
        cases = [
            ("normal commuting pair", T1, T2, True),
            ("polynomial in a Hermitian matrix", H, H @ H - 2 * H, True),
            ("disjoint blocks", np.block([[L, Zn], [Zn, Zn]]), np.block([[Zn, Zn], [Zn, L.T]]), True),
            ("ladder and its transpose", L, L.T.copy(), False),
            ("commuting but non-normal pair", L + 1, L @ L - 2 * L, False),
            ("non-commuting Hermitian pair", H, L + L.T, False),
        ]
        for name, X, Y, expect in cases:
            got = zcalc.strongly_commute(X, Y, tol)
            report.add(Check.exact(f"zcalc/commute {name}", "strong commutation", got == expect,
                                   None if got == expect else f"got {got}"))
    elif args.action == "product":
        T1, T2 = _normal_pair(rng, n, args.scale)
        pr = zcalc.affiliated_product(T1, T2, 1e-8)
        report.add(Check.measured("zcalc/product z-consistency", "product of strongly commuting elements",
                                  pr.q_consistency, 1e-8))
        report.add(Check.measured("zcalc/product gram = f", "product of strongly commuting elements",
                                  pr.q_gram_vs_f, 1e-8))
    else:
        T1, T2 = _normal_pair(rng, n, args.scale)
        dr = zcalc.density_surrogate(T1, T2)
        report.add(Check.exact("zcalc/density f zero set", "zero set of f on the unit square",
                               dr.zero_set == [(0.0, 1.0), (1.0, 0.0)], str(dr.zero_set)))
        report.add(Check.exact("zcalc/density f=0 implies g=0", "f and g on the unit square", dr.implication_holds))
        report.add(Check.exact("zcalc/density invertible surrogate", "density surrogate",
                               dr.min_singular > 0, f"{dr.min_singular:.3e}"))
    return report


# ---------------------------------------------------------------- calibrate

def cmd_calibrate(args, cfg, out) -> Report:
    report = Report(cfg)
    rows = slpoly.calibrate_conventions(cfg.numeric.s, args.h, cfg.tolerances.l2u)
    passing = [r for r in rows if r.passed]
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["l_sign", "r_sign", "l_slot", "r_slot", "determinant", "l2u_residual", "passed"])
    for r in rows:
        c = r.conventions
        w.writerow([c.l_sign, c.r_sign, c.l_slot, c.r_slot, r.determinant, f"{r.l2u_residual:.3e}", r.passed])
    report.add(Check.exact("calibrate/unique passing setting", "convention calibration",
                           len(passing) == 1, f"{len(passing)} settings pass"))
    if len(passing) == 1:
        chosen = passing[0].conventions
        report.add(Check.exact("calibrate/config matches", "convention calibration",
                               chosen == cfg.conventions.conventions(), str(chosen.as_dict())))
    r = heisen.build_irrep(cfg.numeric.lam, 0.0, 32)
    g, h = (0.3 + 0.4j, 0.2), (-0.5 + 0.1j, 0.7)
    signs = [sg for sg in (1, -1) if heisen.group_law_residual(r, g, h, sg) <= cfg.tolerances.weyl]
    report.add(Check.exact("calibrate/group-law sign", "Heisenberg group law",
                           signs == [cfg.conventions.group_law_sign], f"passing signs {signs}"))
    return report


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hlqg", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="group", required=True)

    h = sub.add_parser("hopf").add_subparsers(dest="action", required=True)
    hv = h.add_parser("verify")
    hv.add_argument("--random", type=int)
    hv.add_argument("--seed", type=int)
    hv.add_argument("--s", help="specialize s to this exact rational")
    hv.set_defaults(fn=cmd_hopf_verify)

    nf = sub.add_parser("nf")
    nf.add_argument("expr")
    nf.add_argument("--s", help="specialize s to this exact rational")
    nf.set_defaults(fn=cmd_nf, action="nf")

    r = sub.add_parser("rep").add_subparsers(dest="action", required=True)
    for name, fn in (("build", cmd_rep_build), ("check", cmd_rep_check), ("tensor", cmd_rep_tensor),
                     ("shift", cmd_rep_shift), ("sumt", cmd_rep_sumt), ("asa1", cmd_rep_asa1)):
        rp = r.add_parser(name)
        rp.add_argument("--c", type=complex_arg)
        rp.add_argument("--s", type=float)
        rp.add_argument("--N", type=int)
        rp.add_argument("--P", type=int)
        if name in ("build", "check"):
            rp.add_argument("--case", default="gamma_invertible",
                            choices=("gamma_invertible", "gamma_zero", "direct_sum"))
        if name in ("tensor", "shift"):
            rp.add_argument("--c2", type=complex_arg)
        if name == "shift":
            rp.add_argument("--z", type=complex_arg, default=0.5)
        if name == "sumt":
            rp.add_argument("--form", default="exact", choices=hlrep.SUMT_FORMS)
        rp.set_defaults(fn=fn)

    ht = sub.add_parser("heat")
    ht.add_argument("action", choices=("direct", "smeared", "compare"))
    ht.add_argument("--lam", type=float)
    ht.add_argument("--t", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    ht.add_argument("--N", type=int)
    ht.add_argument("--P", type=int)
    ht.set_defaults(fn=cmd_heat)

    k = sub.add_parser("kernel")
    k.add_argument("action", choices=("psi", "htilde", "l", "fgen", "gw"))
    k.add_argument("--s", type=float)
    k.add_argument("--z", type=complex_arg, default=1)
    k.add_argument("--zp", type=complex_arg, default=1j)
    k.add_argument("--w", type=complex_arg, nargs="+", default=[0, 0.5, 1, 2])
    k.add_argument("--w1", type=complex_arg, default=0.5)
    k.add_argument("--w2", type=complex_arg, default=0.3j)
    k.add_argument("--direct", action="store_true", help="also run the brute-force 4-D quadrature")
    k.add_argument("--alpha", type=complex_arg, default=0.3)
    k.add_argument("--gamma", type=complex_arg, default=0.5)
    k.add_argument("--delta", type=complex_arg, default=0.2)
    k.add_argument("--trials", type=int, default=100)
    k.add_argument("--seed", type=int, default=0)
    k.set_defaults(fn=cmd_kernel)

    z = sub.add_parser("zcalc")
    z.add_argument("action", choices=("roundtrip", "commute", "product", "density"))
    z.add_argument("--n", type=int, default=6)
    z.add_argument("--trials", type=int, default=10)
    z.add_argument("--scale", type=float, default=3.0)
    z.add_argument("--seed", type=int)
    z.set_defaults(fn=cmd_zcalc)

    c = sub.add_parser("calibrate")
    c.add_argument("action", choices=("conventions",))
    c.add_argument("--h", type=float, default=1e-3)
    c.set_defaults(fn=cmd_calibrate)
    return p


def main(argv: list[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = load_config(args.config)
        report = args.fn(args, cfg, out)
    except (ParseError, ConfigError, UsageError, OSError, ValueError) as exc:
        print(f"hlqg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if report.checks:
        text = report.to_json()
        if args.out:
            report.write(args.out)
        elif args.group not in ("kernel", "calibrate", "nf"):
            print(text, file=out)
        status = "PASS" if report.passed else "FAIL"
        n_fail = sum(not c.passed for c in report.checks)
        print(f"{status}: {len(report.checks) - n_fail}/{len(report.checks)} checks", file=sys.stderr)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
