"""Command line interface.

Exit codes: 0 success, 1 input error, 2 internal invariant violation,
3 soundness violation detected during a scan.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import modsym, pipeline, quad
from .modsym import IntegralityViolation
from .pipeline import DEFAULT_SCAN_CAP, SoundnessError
from .predict import heuristic_model


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    p = _Parser(prog="heckemod2", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="analyze one prime level")
    a.add_argument("N", type=int)
    a.add_argument("--json", action="store_true")

    s = sub.add_parser("scan", help="analyze a range of primes into a record file")
    s.add_argument("--from", dest="lo", type=int, required=True)
    s.add_argument("--to", dest="hi", type=int, default=DEFAULT_SCAN_CAP)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--resume", action="store_true")
    s.add_argument("--quiet", action="store_true")

    st = sub.add_parser("stats", help="summarize a record file")
    st.add_argument("--in", dest="inp", required=True)
    st.add_argument("--json", action="store_true")

    pr = sub.add_parser("predict", help="predicted eigensystems for one prime")
    pr.add_argument("N", type=int)
    pr.add_argument("--json", action="store_true")

    cg = sub.add_parser("classgroup", help="class-field invariants of Q(sqrt(D))")
    cg.add_argument("D", type=int)
    cg.add_argument("--json", action="store_true")

    hk = sub.add_parser("hecke", help="integer matrix of T_p at prime level N")
    hk.add_argument("N", type=int)
    hk.add_argument("P", type=int)
    hk.add_argument("--dump", action="store_true")
    return p


def _cmd_analyze(args) -> int:
    rec = pipeline.analyze(args.N)
    if args.json:
        print(json.dumps(rec.to_dict()))
        return 0
    print(f"N = {rec.N} (mod 8: {rec.residue8}), genus {rec.genus}")
    print(f"eigenvalue 0: present={rec.has0} multiplicity={rec.mult0} rank={rec.rank0}")
    print(f"eigenvalue 1: present={rec.has1} multiplicity={rec.mult1} rank={rec.rank1}")
    p = rec.prediction
    print(
        f"predicted: ss={p.ss_count} ({p.ss_field}), reducible={p.reducible},"
        f" ordinary dihedral +/-: {p.ord_dih_plus}/{p.ord_dih_minus}"
        f" (a2=1: {p.ord_dih_plus_a2_1}/{p.ord_dih_minus_a2_1})"
    )
    print(f"bounds: mult0 >= {p.mult0_lb}, mult1 >= {p.mult1_lb};"
          f" excess: {rec.excess0}/{rec.excess1}")
    for v in pipeline.soundness_violations(rec):
        print("SOUNDNESS VIOLATION:", v)
    return 0


def _cmd_scan(args) -> int:
    def progress(rec):
        if not args.quiet:
            print(
                f"N={rec.N} g={rec.genus} has0={int(rec.has0)} has1={int(rec.has1)}"
                f" mult=({rec.mult0},{rec.mult1})",
                file=sys.stderr,
            )

    summary = pipeline.scan(
        args.lo, args.hi, jobs=args.jobs, out=args.out, resume=args.resume,
        progress=progress,
    )
    print(pipeline.format_stats(summary))
    return 0


def _cmd_stats(args) -> int:
    summary, text = pipeline.stats(args.inp)
    if args.json:
        out = summary.to_dict()
        hm = heuristic_model()
        out["model"] = {
            "cl_constant": hm.cl_constant,
            "p_ss_5mod8": hm.p_ss_5mod8,
            "p_either_dih_7mod8": hm.p_either_dih_7mod8,
        }
        print(json.dumps(out))
    else:
        print(text)
    return 0


def _cmd_predict(args) -> int:
    from .numth import is_prime
    from .predict import predict

    n = args.N
    if not is_prime(n) or n < 3:
        raise _UsageError(f"N must be an odd prime >= 3, got {n}")
    pred = predict(n, quad.invariants(n, 1), quad.invariants(n, -1))
    if args.json:
        print(json.dumps(pred.to_dict()))
    else:
        for k, v in pred.to_dict().items():
            print(f"{k}: {v}")
    return 0


def _cmd_classgroup(args) -> int:
    fld = quad.quad_field(args.D)
    cg = quad.class_group(fld)
    split = quad.splitting_of_2(fld)
    info = {
        "d": fld.d,
        "disc": fld.disc,
        "h": cg.h,
        "structure": cg.structure,
        "h_odd": cg.h_odd,
        "h_even": cg.h_even,
        "split2": split,
        "ord_p2": quad.p2_order(fld),
    }
    if fld.real:
        u = quad.fundamental_unit(fld)
        info["unit"] = str(u)
        info["unit_norm"] = u.norm
    if split == quad.INERT:
        if fld.real:
            info["unit_is_1_mod2"] = quad.unit_residue_mod2(fld)
        info["h_ray2"] = quad.ray_class_number_2(fld)
    if args.json:
        print(json.dumps(info))
    else:
        for k, v in info.items():
            print(f"{k}: {v}")
    return 0


def _cmd_hecke(args) -> int:
    space = modsym.build_space(args.N)
    mat = modsym.hecke_matrix(space, args.P)
    if args.dump:
        print(space.dump_hecke(mat))
    else:
        for row in mat.entries:
            print(" ".join(str(v) for v in row))
    return 0


_COMMANDS = {
    "analyze": _cmd_analyze,
    "scan": _cmd_scan,
    "stats": _cmd_stats,
    "predict": _cmd_predict,
    "classgroup": _cmd_classgroup,
    "hecke": _cmd_hecke,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.cmd](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IntegralityViolation as exc:
        print(f"integrality violation: {exc}", file=sys.stderr)
        return 2
    except SoundnessError as exc:
        print("soundness violations detected:", file=sys.stderr)
        for v in exc.violations:
            print("  " + v, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
