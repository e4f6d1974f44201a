"""Command line entry point: ``gapcert <command> ...``.

Exit codes: 0 success, 2 invalid input or complex, 3 solver failure,
4 verification mismatch. Reports are JSON with sorted keys.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .complex import (MatricialComplex, check_complex, from_koszul, from_presentation,
                      laplacian)
from .errors import GapcertError, MalformedCertificate, SolverDiverged
from .group import GroupDescriptor

EXIT_INVALID = 2
EXIT_SOLVER = 3
EXIT_MISMATCH = 4


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=1, sort_keys=True, default=str)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def load_any_complex(path) -> MatricialComplex:
    """A complex JSON file, or a group descriptor turned into its presentation complex."""
    with open(path) as fh:
        data = json.load(fh)
    if "dims" in data:
        return MatricialComplex.from_json(data)
    return from_presentation(GroupDescriptor.from_json(data))


def _policy():
    from .lift import TruncationPolicy
    env = os.environ.get("GAPCERT_MAX_RADIUS")
    return TruncationPolicy(max_radius=int(env)) if env else TruncationPolicy()


def _sdp_config(args):
    from .soscert import SDPConfig
    tol = args.sdp_tol if args.sdp_tol is not None else float(
        os.environ.get("GAPCERT_SDP_TOL", "1e-8"))
    return SDPConfig(tol=tol, max_denominator=args.max_denominator)


def _radius(value):
    return value if value == "full" else int(value)


# ---- complex / laplacian ---------------------------------------------------------------

def cmd_complex(args) -> int:
    if args.action == "build":
        if args.koszul:
            C = from_koszul(args.koszul)
        elif args.group:
            with open(args.group) as fh:
                C = from_presentation(GroupDescriptor.from_json(json.load(fh)))
        else:
            print("need --group or --koszul", file=sys.stderr)
            return EXIT_INVALID
    else:
        C = load_any_complex(args.complex)
    report = check_complex(C)
    if args.out and report.valid:
        C.save(args.out)
    if not report.valid:
        n, w = report.failures[0]
        i, j, word, val = w.first_nonzero()
        print(f"d{n + 1}*d{n} != 0; entry ({i},{j}) = {w[i, j]}, first coefficient "
              f"{val} at {word or 'e'}", file=sys.stderr)
        print(json.dumps(report.to_json(), sort_keys=True))
        return EXIT_INVALID
    for n in range(C.length - 1):
        print(f"d{n + 1}*d{n} = 0 verified")
    print(json.dumps({"name": C.name, "dims": list(C.dims), "valid": True}, sort_keys=True))
    return 0


def cmd_laplacian(args) -> int:
    C = load_any_complex(args.complex)
    L = laplacian(C, args.degree, args.kind)
    _emit({"degree": args.degree, "kind": args.kind,
           "rows": [[str(L[i, j]) for j in range(L.cols)] for i in range(L.rows)]}, args.out)
    return 0


# ---- certificates -----------------------------------------------------------------------

def cmd_certify(args) -> int:
    from .soscert import CertProblem, certify, verify_certificate
    C = load_any_complex(args.complex)
    p = CertProblem(C, args.degree, args.form,
                    Fraction(args.epsilon) if args.epsilon is not None else None,
                    _radius(args.radius) if args.radius is not None else None,
                    Fraction(args.fixed_scalar) if args.fixed_scalar is not None else None)
    try:
        cert = certify(p, _sdp_config(args))
    except SolverDiverged as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    out = args.out or "certificate.json"
    cert.save(out)
    from .soscert import load_certificate
    check = verify_certificate(load_certificate(out))
    summary = {"certificate": out, "form": p.form, "degree": p.degree,
               "radius": p.resolved_radius(), p.scalar_name: str(cert.scalar),
               p.scalar_name + "_float": float(cert.scalar),
               "objective": round(cert.solver.objective, 9),
               "status": cert.status, "residual_l1": str(cert.residual_l1),
               "verified": check.status, "screen_passed": cert.screen.get("passed")}
    print(json.dumps(summary, indent=1, sort_keys=True))
    if check.status != cert.status or not check.matches_stored:
        return EXIT_MISMATCH
    return 0


def cmd_verify(args) -> int:
    from .soscert import CertProblem, load_certificate, verify_certificate
    try:
        cert = load_certificate(args.certificate)
        p = cert.problem
        if args.complex:
            C = load_any_complex(args.complex)
            p = CertProblem(C, p.degree, p.form, p.epsilon, p.radius, p.fixed_scalar)
        rep = verify_certificate(cert, p)
    except MalformedCertificate as exc:
        print(f"malformed certificate: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    print(rep.status if rep.status == "Exact" else f"{rep.status} residual_l1={rep.residual_l1}")
    print(json.dumps(rep.to_json(), sort_keys=True))
    if rep.status != cert.status or not rep.matches_stored:
        return EXIT_MISMATCH
    return 0


# ---- GNS / functionals ---------------------------------------------------------------------

def cmd_gns(args) -> int:
    from .gns import cocycle_from_functional, gns_construct, load_functional, \
        reproduction_error
    C = load_any_complex(args.complex)
    psi = load_functional(C.group, args.functional)
    if args.degree is not None:
        model, z = cocycle_from_functional(psi, C, args.degree, args.radius)
    else:
        model = gns_construct(psi, args.radius)
        z = model.cyclic.reshape(-1)
    _emit({"dim": model.dim, "approximate": model.approximate,
           "reproduction_error": reproduction_error(psi, model, args.radius),
           "cyclic": np.round(z, 12).tolist(),
           "rep": model.rep.to_json() if model.dim else None}, args.out)
    return 0


def cmd_functional(args) -> int:
    from .gns import extend_functional, load_functional
    C = load_any_complex(args.complex)
    psi = load_functional(C.group, args.functional)
    rep = extend_functional(psi, C, args.degree, args.radius)
    _emit(rep.to_json(), args.out)
    return 0


# ---- exploration -------------------------------------------------------------------------------

def cmd_explore(args) -> int:
    from .lift import (RadiusExhausted, im_D_membership, kernel_basis,
                       random_kernel_elements, sc_decompose)
    C = load_any_complex(args.complex)
    pol = _policy()
    rows = []
    if args.what == "homology":
        n = args.degree
        cands = [("diagonal kernel basis", a) for a in kernel_basis(C, n, args.radius, True)]
        if args.samples:
            cands += [("random kernel sample", a) for a in
                      random_kernel_elements(C, n, args.radius, args.samples, args.seed)]
        for source, a in cands:
            mem = im_D_membership(C, n, a, pol)
            try:
                sc = sc_decompose(C, n, a, pol)
                sc_status = f"witness ({sc.method})"
            except RadiusExhausted as exc:
                sc_status = f"not found up to radius {exc.radius}"
            rows.append({"source": source, "element": _show(a), "im_D": mem.status,
                         "im_D_reason": mem.reason, "sc": sc_status})
        summary = {"kernel_elements": len(rows),
                   "proven_outside_im_D": sum(r["im_D"] == "proven_infeasible" for r in rows)}
    else:
        i = args.i
        samples = random_kernel_elements(C, i, args.radius, args.samples, args.seed) \
            if args.samples else []
        ok = 0
        for a in samples:
            try:
                dec = sc_decompose(C, i, a, pol)
                ok += 1
                rows.append({"element": _show(a), "sc": "witness", "method": dec.method})
            except RadiusExhausted as exc:
                rows.append({"element": _show(a), "sc": f"not found up to radius {exc.radius}"})
        summary = {"decomposed": ok, "samples": len(samples)}
        print(f"{ok}/{len(samples)} decomposed", file=sys.stderr)
    _emit({"what": args.what, "seed": args.seed, "radius": args.radius, "summary": summary,
           "table": rows}, args.out)
    return 0


def _show(A) -> list:
    return [[str(A[i, j]) for j in range(A.cols)] for i in range(A.rows)]


# ---- oracle -------------------------------------------------------------------------------------

def cmd_oracle(args) -> int:
    from .oracle import apply_rep, hermitian_eigenvalues, regular_rep, spectral_gap, torus_rep
    C = load_any_complex(args.complex)
    if args.theta:
        rep = torus_rep(C.group, [float(eval_angle(t)) for t in args.theta.split(",")])
    else:
        rep = regular_rep(C.group)
    L = laplacian(C, args.degree, args.kind)
    ev = hermitian_eigenvalues(apply_rep(rep, L))
    gap, kernel = spectral_gap(rep, L)
    _emit({"degree": args.degree, "kind": args.kind, "eigenvalues": np.round(ev, 10).tolist(),
           "gap": gap, "kernel_dim": kernel}, args.out)
    return 0


def eval_angle(text: str) -> float:
    """Parse angles such as ``pi``, ``pi/2``, ``-pi/3`` or plain floats."""
    t = text.strip().lower().replace(" ", "")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    coef = num.replace("pi", "").replace("*", "")
    c = -1.0 if coef == "-" else (1.0 if coef in ("", "+") else float(coef))
    return c * np.pi / (float(den) if den else 1.0)


# ---- parser -----------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gapcert", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("complex", help="build or check a matricial complex")
    c.add_argument("action", choices=["build", "check"])
    c.add_argument("--group")
    c.add_argument("--koszul", type=int)
    c.add_argument("--complex")
    c.add_argument("--check", action="store_true", help="verify d_{n+1} d_n = 0 (always done)")
    c.add_argument("--out")
    c.set_defaults(func=cmd_complex)

    lp = sub.add_parser("laplacian", help="print a Laplacian")
    lp.add_argument("action", choices=["show"])
    lp.add_argument("--complex", required=True)
    lp.add_argument("--degree", type=int, required=True)
    lp.add_argument("--kind", choices=["plus", "minus", "full"], default="full")
    lp.add_argument("--out")
    lp.set_defaults(func=cmd_laplacian)

    ce = sub.add_parser("certify", help="search for a sum of squares certificate")
    ce.add_argument("--complex", required=True)
    ce.add_argument("--form", choices=["gap_plus", "gap_full", "ht_full", "ht_plus"],
                    default="gap_plus")
    ce.add_argument("--degree", type=int, default=1)
    ce.add_argument("--radius")
    ce.add_argument("--epsilon")
    ce.add_argument("--fixed-scalar", dest="fixed_scalar")
    ce.add_argument("--max-denominator", dest="max_denominator", type=int, default=10**6)
    ce.add_argument("--sdp-tol", dest="sdp_tol", type=float)
    ce.add_argument("--out")
    ce.set_defaults(func=cmd_certify)

    ve = sub.add_parser("verify", help="re-verify a certificate file exactly")
    ve.add_argument("certificate")
    ve.add_argument("--complex")
    ve.set_defaults(func=cmd_verify)

    gn = sub.add_parser("gns", help="GNS model of a functional")
    gn.add_argument("action", choices=["run"])
    gn.add_argument("--functional", required=True)
    gn.add_argument("--complex", required=True)
    gn.add_argument("--radius", type=int, default=1)
    gn.add_argument("--degree", type=int, help="treat the functional as a cocycle functional")
    gn.add_argument("--out")
    gn.set_defaults(func=cmd_gns)

    fu = sub.add_parser("functional", help="positive extension of a functional")
    fu.add_argument("action", choices=["extend"])
    fu.add_argument("--functional", required=True)
    fu.add_argument("--complex", required=True)
    fu.add_argument("--degree", type=int, required=True)
    fu.add_argument("--radius", type=int, default=1)
    fu.add_argument("--out")
    fu.set_defaults(func=cmd_functional)

    ex = sub.add_parser("explore", help="Im D and split conjugation membership tables")
    ex.add_argument("what", choices=["homology", "sc"])
    ex.add_argument("--complex", required=True)
    ex.add_argument("--degree", type=int, default=1)
    ex.add_argument("--i", type=int, default=1)
    ex.add_argument("--radius", type=int, default=1)
    ex.add_argument("--samples", type=int, default=0)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--out")
    ex.set_defaults(func=cmd_explore)

    orc = sub.add_parser("oracle", help="spectra in the regular or a torus representation")
    orc.add_argument("action", choices=["eig"])
    orc.add_argument("--complex", required=True)
    orc.add_argument("--degree", type=int, default=0)
    orc.add_argument("--kind", choices=["plus", "minus", "full"], default="full")
    orc.add_argument("--theta", help="comma separated angles, e.g. pi,pi")
    orc.add_argument("--out")
    orc.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SolverDiverged as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (GapcertError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
