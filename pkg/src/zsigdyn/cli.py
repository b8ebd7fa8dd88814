"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 a computation contradicted a
prediction, 3 the numerics could not decide.  Errors are reported as a
JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence, TextIO

from . import bounds, classifier, divisibility, mahler, mandelbrot, orbit, sweep

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_param_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--a", type=int, help="numerator of c")
    p.add_argument("--b", type=int, default=None, help="denominator of c (default 1)")
    p.add_argument("--c", type=str, help="c as a rational, e.g. -7/4")
    p.add_argument("--d", type=int, default=2, help="degree (default 2)")


def _param(args) -> orbit.Parameter:
    if args.c is not None:
        if args.a is not None or args.b is not None:
            raise UsageError("give either --c or --a/--b, not both")
        a, b = orbit.parse_rational(args.c)
    elif args.a is not None:
        a, b = args.a, 1 if args.b is None else args.b
    else:
        raise UsageError("a parameter is required: --c or --a [--b]")
    return orbit.make_parameter(a, b, args.d)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")

    parser = _Parser(prog="zsigdyn", description="Critical orbits of z^d + c and their Zsigmondy sets.")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("orbit", parents=[common], help="numerators a_1..a_n")
    _add_param_args(p)
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("zsig", parents=[common], help="is n in the Zsigmondy set?")
    _add_param_args(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--no-witness", action="store_true", help="skip searching for a primitive prime")

    p = sub.add_parser("set", parents=[common], help="the Zsigmondy set up to --max-n")
    _add_param_args(p)
    p.add_argument("--max-n", type=int, required=True)
    p.add_argument("--include-n1", action="store_true", help="also report whether a_1 = +-1")

    p = sub.add_parser("classify", parents=[common], help="which result determines the set")
    _add_param_args(p)
    p.add_argument("--verify-n", type=int, default=None, help="also compare with the set computed up to this index")

    p = sub.add_parser("sweep", parents=[common], help="classify and verify a grid of parameters (JSON lines)")
    p.add_argument("--d-range", type=int, nargs=2, default=(2, 2), metavar=("LO", "HI"))
    p.add_argument("--b-range", type=int, nargs=2, default=(2, 10), metavar=("LO", "HI"))
    p.add_argument("--height", type=int, default=20, help="bound on max(|a|, b)")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--mode", choices=sweep.MODES, default="verify")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", type=str, default=None, help="also write the records to this file")

    p = sub.add_parser("mahler", parents=[common], help="constants of the uniform size bound")
    p.add_argument("--d", type=int, nargs="+", default=[2, 4, 6])

    p = sub.add_parser("mandel", parents=[common], help="attracting regions D(n, rho) at a parameter")
    p.add_argument("--c", type=str, required=True, help="rational or complex, e.g. -7/4 or -0.12+0.74j")
    p.add_argument("--max-period", type=int, default=mandelbrot.MAX_PERIOD)
    p.add_argument("--rho", type=str, default=None, help="fixed rho instead of min(1/4, 2^(-2^(n-2)))")

    p = sub.add_parser("msolve", parents=[common], help="index past which the size inequality always fails")
    _add_param_args(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--n-probe", type=int, default=64)
    return parser


# -- subcommands ------------------------------------------------------------------


def _cmd_orbit(args):
    param = _param(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    cache = os.environ.get(orbit.CACHE_ENV)
    orb = orbit.read_orbit_cache(cache, param) if cache else None
    have = len(orb) if orb else 0
    orb = orbit.extend_orbit(orb or orbit.new_orbit(param), args.n)
    if cache and len(orb) > have:
        orbit.append_orbit_cache(cache, orb, start=have + 1)
    terms = [{"n": t.n, "numerator": t.numerator, "denominator": f"{param.b}^{t.denom_exp}"} for t in orb.terms[: args.n]]
    text = "\n".join(f"a_{t['n']} = {t['numerator']}" for t in terms)
    return {"a": param.a, "b": param.b, "d": param.d, "terms": terms}, text, EXIT_OK


def _cmd_zsig(args):
    param = _param(args)
    if args.n < 2:
        raise UsageError("the Zsigmondy set starts at n = 2")
    v = divisibility.ZsigmondyScanner(param, find_witness=not args.no_witness).verdict(args.n)
    out = v.to_json(param)
    text = f"n = {v.n}: {'in' if v.in_zsigmondy else 'not in'} the Zsigmondy set ({v.certificate_kind}; {v.detail})"
    return out, text, EXIT_OK


def _cmd_set(args):
    param = _param(args)
    if args.max_n < 2:
        raise UsageError("--max-n must be >= 2")
    found = list(divisibility.scan_zsigmondy_set(param, args.max_n))
    out = {"a": param.a, "b": param.b, "d": param.d, "max_n": args.max_n, "set": found}
    if args.include_n1:
        out["a_1_is_unit"] = abs(param.a) == 1
    return out, json.dumps(found), EXIT_OK


def _cmd_classify(args):
    param = _param(args)
    cls = classifier.classify(param)
    out = cls.to_json()
    code = EXIT_OK
    if args.verify_n is not None:
        try:
            report = classifier.verify_against_computation(param, args.verify_n)
        except classifier.MismatchError as exc:
            report = exc.report
            code = EXIT_MISMATCH
        out = report.to_json()
    return out, _text(out), code


def _cmd_sweep(args, stdout: TextIO, stderr: TextIO):
    spec = sweep.SweepSpec(tuple(args.d_range), tuple(args.b_range), args.height, args.n_max, args.mode, args.jobs, args.output)
    fh = open(spec.output, "w") if spec.output else None
    records = []

    def emit(obj):
        line = json.dumps(obj, sort_keys=True)
        print(line, file=stdout, flush=True)
        if fh:
            fh.write(line + "\n")

    try:
        try:
            for rec in sweep.run_sweep(spec):
                records.append(rec)
                emit(rec.to_json())
        except (sweep.SweepAborted, sweep.SweepFailure) as exc:
            emit({"summary": sweep.summarize(records), "aborted": str(exc)})
            return _fail(stderr, "mismatch", str(exc), EXIT_MISMATCH)
        emit({"summary": sweep.summarize(records)})
        return EXIT_OK
    finally:
        if fh:
            fh.close()


def _cmd_mahler(args):
    rows = [mahler.standard_params(d) for d in args.d]
    out = [r.to_json() for r in rows]
    head = f"{'d':>3} {'m':>2} {'eps':>10} {'kappa':>8} {'n1_min':>6} {'gap':>8} {'N':>2} {'bound':>5}"
    lines = [head]
    for r in rows:
        lines.append(f"{r.d:>3} {r.m:>2} {r.eps:>10.6g} {r.kappa:>8.4f} {r.n1_min:>6} {r.gap:>8.4f} {r.N:>2} {r.size_bound:>5}")
        lines += [f"    note: {n}" for n in r.notes]
        lines += [f"    FAILED: {k} (margin {m:.4g})" for k, (m, ok) in r.checks.items() if not ok]
    code = EXIT_OK if all(ok for r in rows for _, ok in r.checks.values()) else EXIT_MISMATCH
    return out, "\n".join(lines), code


def _mandel_c(text: str):
    try:
        return Fraction(text.strip())
    except ValueError:
        return mandelbrot.parse_complex(text)


def _cmd_mandel(args):
    c = _mandel_c(args.c)
    if not 1 <= args.max_period <= mandelbrot.MAX_PERIOD:
        raise UsageError(f"--max-period must lie in [1, {mandelbrot.MAX_PERIOD}]")
    fixed_rho = float(Fraction(args.rho)) if args.rho is not None else None
    analysis = mandelbrot.analyze_critical_orbit(complex(c), args.max_period)
    periods = []
    for n in range(1, args.max_period + 1):
        rho = fixed_rho if fixed_rho is not None else mandelbrot.rho_n(n)
        v = mandelbrot.in_D(c, n, rho, analysis=analysis)
        entry = v.to_json()
        value = abs(mandelbrot.iterate_critical(complex(c), n))
        entry["abs_fn0"] = value
        if 0 < rho < 0.25:
            entry["lower_bound"] = rho / 2 ** (2 * n + 2)
        periods.append(entry)
    decided = [p["in_D"] for p in periods]
    in_s = False if any(decided) else (None if None in decided else True)
    out = {
        "c": [complex(c).real, complex(c).imag],
        "critical_orbit": analysis.kind,
        "attracting_cycle": analysis.cycle.to_json() if analysis.cycle else None,
        "periods": periods,
        "in_S_up_to_period": in_s,
        "max_period": args.max_period,
    }
    rho0 = fixed_rho if fixed_rho is not None else 0.25
    if 0 < rho0 <= 0.25:
        out["distortion"] = mandelbrot.blaschke_distortion_check(rho0).to_json()
    if isinstance(c, Fraction) and c.denominator > 1 and -2 < c < -1:
        out["ca_inequality"] = [mandelbrot.ca_inequality(c.denominator, n).to_json() for n in range(3, args.max_period + 1)]
    lines = [f"c = {c}: critical orbit {analysis.kind}"]
    for p in periods:
        lines.append(f"  n={p['n']:>2} rho={p['rho']:.3g} in_D={p['in_D']}  ({p['certificate']})")
    lines.append(f"  in S up to period {args.max_period}: {in_s}")
    code = EXIT_INCONCLUSIVE if None in decided and not any(decided) else EXIT_OK
    return out, "\n".join(lines), code


def _cmd_msolve(args):
    param = _param(args)
    m = bounds.effective_M_solver(param, args.eps, args.tau, args.n_probe)
    out = {"a": param.a, "b": param.b, "d": param.d, "eps": args.eps, "tau": args.tau, "M": m}
    return out, f"M = {m}", EXIT_OK


def _text(obj) -> str:
    if isinstance(obj, dict):
        return "\n".join(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in obj.items())
    return json.dumps(obj)


def _default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


_HANDLERS = {
    "orbit": _cmd_orbit,
    "zsig": _cmd_zsig,
    "set": _cmd_set,
    "classify": _cmd_classify,
    "mahler": _cmd_mahler,
    "mandel": _cmd_mandel,
    "msolve": _cmd_msolve,
}


def _fail(stderr: TextIO, kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=stderr)
    return code


_VALUE_FLAGS = ("--c", "--rho", "--eps", "--tau")


def _glue_negative_values(argv: list[str]) -> list[str]:
    # argparse reads "-7/4" as an option; bind such values to their flag
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run_command(argv: Sequence[str], stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(_glue_negative_values(list(argv)))
        if args.command == "sweep":
            return _cmd_sweep(args, stdout, stderr)
        out, text, code = _HANDLERS[args.command](args)
    except UsageError as exc:
        return _fail(stderr, "usage", str(exc), EXIT_USAGE)
    except (orbit.ParameterError, ValueError) as exc:
        return _fail(stderr, "usage", str(exc), EXIT_USAGE)
    except (classifier.MismatchError, sweep.SweepAborted, divisibility.RigidityViolation) as exc:
        return _fail(stderr, "mismatch", str(exc), EXIT_MISMATCH)
    except (orbit.InconclusiveError, bounds.TailCertificationError, mandelbrot.RootFindingError) as exc:
        return _fail(stderr, "inconclusive", str(exc), EXIT_INCONCLUSIVE)
    except orbit.OrbitSizeError as exc:
        return _fail(stderr, "size", str(exc), EXIT_INCONCLUSIVE)
    print(json.dumps(out, default=_default) if args.json else text, file=stdout)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
