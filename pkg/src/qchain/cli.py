"""qchain command line: basis, verify, rotator, spectrum, fit, limit.

Exit codes: 0 ok, 1 verification failure, 2 usage or domain error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from .algebra import RelationReport, build_glq, check_chevalley, check_serre
from .chains import CHAIN_KINDS, build_chain, check_chain, classical_limit_check
from .fock import basis_listing, build_basis
from .qnum import DeformationParameter, ParameterError
from .spectra import (
    FitError,
    build_hamiltonian,
    eigenlevels,
    fit_rotator,
    read_levels,
    rotator_spectrum,
    symmetrize,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class IOFailure(Exception):
    pass


def _parameter(args, required=True) -> DeformationParameter | None:
    if args.q is not None:
        return DeformationParameter.real(args.q)
    if args.tau is not None:
        return DeformationParameter.phase(args.tau)
    if required:
        raise ValueError("one of --q or --tau is required")
    return None


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _report_csv(rep: RelationReport) -> str:
    return _csv(["relation", "residual", "passed"],
                [(e.relation, f"{e.residual:.6e}", int(e.passed)) for e in rep.entries])


def cmd_basis(args) -> tuple[int, str]:
    if args.modes < 1:
        raise ValueError("--modes must be >= 1")
    b = build_basis(args.modes, args.total)
    if args.output == "json":
        return EXIT_OK, _json({"modes": b.n_modes, "total": b.total, "dim": b.dim,
                               "states": [list(s) for s in b.states]})
    if args.output == "csv":
        return EXIT_OK, _csv(["index"] + [f"n{k + 1}" for k in range(b.n_modes)],
                             [(i, *s) for i, s in enumerate(b.states)])
    return EXIT_OK, "\n".join(basis_listing(b)) + "\n"


def cmd_verify(args) -> tuple[int, str]:
    q = _parameter(args)
    if args.chain == "glq6":
        alg = build_glq(build_basis(6, args.total), q)
        rep = RelationReport(tol=args.tol)
        rep.extend(check_chevalley(alg, q, args.tol))
        rep.extend(check_serre(alg, q, args.tol))
    else:
        chain = build_chain(args.chain, build_basis(6, args.total), q)
        rep = check_chain(chain, tol=args.tol)
    if args.output == "json":
        text = _json(rep.to_dict())
    elif args.output == "csv":
        text = _report_csv(rep)
    else:
        text = rep.to_text()
    return (EXIT_OK if rep.passed else EXIT_FAIL), text


def cmd_rotator(args) -> tuple[int, str]:
    q = _parameter(args)
    js = [args.jmin + k * args.jstep for k in range(int((args.jmax - args.jmin) / args.jstep) + 1)]
    rows = rotator_spectrum(args.K, q, js)
    if args.output == "json":
        return EXIT_OK, _json({"K": args.K, "parameter": str(q),
                               "levels": [{"j": j, "energy": e} for j, e in rows]})
    return EXIT_OK, _csv(["j", "energy"], [(f"{j:g}", f"{e:.12g}") for j, e in rows])


def _terms(specs) -> list[tuple[str, float]]:
    out = []
    for s in specs or ["casimir_soq3=1"]:
        name, _, coeff = s.rpartition("=")
        if not name:
            name, coeff = s, "1"
        out.append((name, float(coeff)))
    return out


def cmd_spectrum(args) -> tuple[int, str]:
    q = _parameter(args)
    basis = build_basis(6, args.total)
    terms = _terms(args.term)

    def builder(qq):
        return build_hamiltonian(build_chain(args.chain, basis, qq), terms)

    h = symmetrize(builder, q) if args.symmetrize else builder(q)
    levels = eigenlevels(h)
    if args.output == "json":
        return EXIT_OK, _json({"chain": args.chain, "parameter": str(q), "total": args.total,
                               "terms": [{"id": n, "coefficient": c} for n, c in terms],
                               "levels": [{"energy": e, "multiplicity": m} for e, m in levels]})
    return EXIT_OK, _csv(["energy", "multiplicity"], [(f"{e:.12g}", m) for e, m in levels])


def cmd_fit(args) -> tuple[int, str]:
    try:
        levels = read_levels(args.levels)
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise IOFailure(f"cannot read levels from {args.levels}: {exc}") from exc
    res = fit_rotator(levels, kind=args.kind)
    if args.output == "json":
        return EXIT_OK, _json(res.to_dict())
    if args.output == "csv":
        return EXIT_OK, _csv(["j", "energy", "model", "residual"],
                             [(f"{j:g}", f"{e:.12g}", f"{m:.12g}", f"{r:.6e}")
                              for j, e, m, r in res.residuals])
    return EXIT_OK, res.to_text()


def cmd_limit(args) -> tuple[int, str]:
    eps = [float(x) for x in args.eps.split(",") if x.strip()]
    rows = classical_limit_check(args.chain, build_basis(6, args.total), eps)
    if args.output == "json":
        return EXIT_OK, _json([{"generator": r.generator, "eps": r.eps, "distance": r.distance}
                               for r in rows])
    return EXIT_OK, _csv(["generator", "eps", "distance"],
                         [(r.generator, f"{r.eps:.6e}", f"{r.distance:.6e}") for r in rows])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qchain", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["text", "json", "csv"], default=None)
    common.add_argument("--out", help="write the result here instead of stdout")
    qopt = argparse.ArgumentParser(add_help=False)
    g = qopt.add_mutually_exclusive_group()
    g.add_argument("--q", type=float, help="real deformation parameter q > 0")
    g.add_argument("--tau", type=float, help="phase q = exp(i tau)")
    total = argparse.ArgumentParser(add_help=False)
    total.add_argument("--total", type=int, default=2, help="boson number N")

    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("basis", parents=[common, total], help="list a Fock sector")
    s.add_argument("--modes", type=int, default=6)
    s.set_defaults(func=cmd_basis, default_output="text")

    s = sub.add_parser("verify", parents=[common, qopt, total], help="check relations")
    s.add_argument("--chain", choices=[*CHAIN_KINDS, "glq6"], required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_verify, default_output="text")

    s = sub.add_parser("rotator", parents=[common, qopt], help="deformed rotator levels")
    s.add_argument("--K", type=float, default=1.0)
    s.add_argument("--jmin", type=float, default=0.0)
    s.add_argument("--jmax", type=float, default=6.0)
    s.add_argument("--jstep", type=float, default=1.0)
    s.set_defaults(func=cmd_rotator, default_output="csv")

    s = sub.add_parser("spectrum", parents=[common, qopt, total],
                       help="eigenlevels of a Hamiltonian built from chain invariants")
    s.add_argument("--chain", choices=CHAIN_KINDS, required=True)
    s.add_argument("--term", action="append",
                   help="ID=COEFF, repeatable; default casimir_soq3=1")
    s.add_argument("--symmetrize", action="store_true", help="average H(q) and H(1/q)")
    s.set_defaults(func=cmd_spectrum, default_output="csv")

    s = sub.add_parser("fit", parents=[common], help="fit (K, tau) to a level scheme")
    s.add_argument("--levels", required=True, help="JSON or CSV with j, energy[, weight]")
    s.add_argument("--kind", choices=["phase", "real"], default="phase")
    s.set_defaults(func=cmd_fit, default_output="text")

    s = sub.add_parser("limit", parents=[common, total], help="q -> 1 convergence table")
    s.add_argument("--chain", choices=CHAIN_KINDS, required=True)
    s.add_argument("--eps", default="1e-2,1e-3,1e-4")
    s.set_defaults(func=cmd_limit, default_output="csv")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.output is None:
        args.output = args.default_output
    if getattr(args, "total", 0) < 0:
        parser.error("--total must be >= 0")
    try:
        code, text = args.func(args)
    except IOFailure as exc:
        print(f"qchain: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParameterError, FitError, ValueError, KeyError) as exc:
        print(f"qchain: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qchain: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
