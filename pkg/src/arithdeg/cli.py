"""Command-line front end: ``arithdeg <subcommand> ...``.

Exit status: 0 success, 1 input error, 2 resource limit, 3 certification
failure. Artifacts go to stdout or ``--out``; logs go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from arithdeg import __version__
from arithdeg.exactnum.bigfloat import default_prec
from arithdeg.exactnum.rational import parse_rat, rat_to_decimal
from arithdeg.rationalmap import ResourceLimitError

log = logging.getLogger("arithdeg")

EXIT_OK, EXIT_INPUT, EXIT_LIMIT, EXIT_CERT = 0, 1, 2, 3


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_rat(text: str) -> Fraction:
    try:
        v = parse_rat(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def parse_point(text: str) -> list[Fraction]:
    """``"1:2/3:-4"`` -> ``[1, 2/3, -4]``."""
    try:
        return [parse_rat(t) for t in text.split(":")]
    except ValueError as exc:
        raise InputError(f"bad point {text!r}: {exc}") from None


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"parameter {item!r} should look like name=value")
        try:
            out[name.strip()] = parse_rat(val)
        except ValueError as exc:
            raise InputError(f"bad value for parameter {name!r}: {exc}") from None
    return out


def resolve(spec: str, params: dict):
    from arithdeg.rationalmap import resolve_map

    try:
        return resolve_map(spec, params or None)
    except (OSError, KeyError, ValueError) as exc:
        raise InputError(f"cannot resolve map {spec!r}: {exc}") from None


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func", "out", "verbose", "quiet")}
    for k, v in list(cfg.items()):
        if isinstance(v, Fraction):
            cfg[k] = str(v)
        elif isinstance(v, list):
            cfg[k] = [str(x) if isinstance(x, Fraction) else x for x in v]
    cfg["precision_bits"] = args.prec or default_prec()
    cfg["version"] = __version__
    return cfg


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _json(args, result) -> str:
    return json.dumps({"config": _config(args), "result": result}, indent=2, sort_keys=True)


# ---------------------------------------------------------------- commands


def cmd_orbit(args) -> int:
    from arithdeg.heightlab import RESOURCE_LIMIT, OrbitLimits, orbit, orbit_csv, orbit_json

    f = resolve(args.map, parse_params(args.param))
    P = parse_point(args.point)
    if len(P) != f.dim + 1:
        raise InputError(f"point has {len(P)} coordinates, map acts on P^{f.dim}")
    rec = orbit(f, P, args.nmax, OrbitLimits(args.max_height_bits), args.prec)
    _emit(args, orbit_csv(rec) if args.format == "csv" else _json(args, orbit_json(rec, f)))
    log.info("orbit stop: %s", rec.describe_stop())
    return EXIT_LIMIT if rec.stop_reason == RESOURCE_LIMIT else EXIT_OK


def cmd_alpha(args) -> int:
    from arithdeg.heightlab import RESOURCE_LIMIT, OrbitLimits, alpha_estimate, orbit

    f = resolve(args.map, parse_params(args.param))
    P = parse_point(args.point)
    if len(P) != f.dim + 1:
        raise InputError(f"point has {len(P)} coordinates, map acts on P^{f.dim}")
    rec = orbit(f, P, args.nmax, OrbitLimits(args.max_height_bits), args.prec)
    try:
        est = alpha_estimate(rec, args.window, float(args.tol), args.prec)
    except ValueError as exc:
        log.error("%s (orbit stop: %s)", exc, rec.describe_stop())
        return EXIT_LIMIT if rec.stop_reason == RESOURCE_LIMIT else EXIT_INPUT
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "root_estimate", "tail_inf", "tail_sup", "ratio_estimate"])
        for i, r in enumerate(est.roots):
            ratio = est.ratios[i] if i < len(est.ratios) else ""
            w.writerow([i + 1, format(float(r), ".12g"), format(float(est.lower_seq[i]), ".12g"),
                        format(float(est.upper_seq[i]), ".12g"), format(float(ratio), ".12g") if ratio != "" else ""])
        _emit(args, buf.getvalue())
    else:
        res = est.to_json()
        res["orbit_stop"] = rec.describe_stop()
        _emit(args, _json(args, res))
    return EXIT_LIMIT if rec.stop_reason == RESOURCE_LIMIT else EXIT_OK


def cmd_degseq(args) -> int:
    from arithdeg.rationalmap import Limits, degree_sequence

    f = resolve(args.map, parse_params(args.param))
    seq = degree_sequence(f, args.K, Limits(args.max_terms, args.max_ops))
    roots, ratios = seq.root_estimates(), seq.ratio_estimates()
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "degree", "terms", "root_estimate", "ratio_estimate"])
        for k, d in enumerate(seq.degs, start=1):
            w.writerow([k, d, seq.terms[k - 1], format(float(roots[k - 1]), ".12g"),
                        format(float(ratios[k - 2]), ".12g") if k >= 2 else ""])
        _emit(args, buf.getvalue())
    else:
        res = seq.to_json()
        res.update({"growth_diagnostic": float(seq.growth_diagnostic()),
                    "submultiplicative": seq.is_submultiplicative()})
        _emit(args, _json(args, res))
    if seq.truncated:
        log.warning("degree sequence truncated: %s", seq.reason)
        return EXIT_LIMIT
    return EXIT_OK


def _delta_row(job):
    from arithdeg.spectral import delta

    n, eps = job
    return n, delta(n, eps)


def cmd_delta(args) -> int:
    from arithdeg.spectral import certify_monotone, delta_star

    lo, hi = getattr(args, "from"), args.to
    if lo < 10 or hi < lo:
        raise InputError("need 10 <= --from <= --to")
    ns = list(range(lo, hi + 1))
    jobs = [(n, args.eps) for n in ns]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = dict(ex.map(_delta_row, jobs))
    else:
        rows = dict(map(_delta_row, jobs))
    rep = certify_monotone(lo, hi, args.eps)
    star = delta_star(args.eps)
    d = args.digits
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lo", "hi", "width"])
        for n in ns:
            iv = rows[n]
            w.writerow([n, rat_to_decimal(iv.lo, d), rat_to_decimal(iv.hi, d, upward=True),
                        rat_to_decimal(iv.width, d, upward=True)])
        _emit(args, buf.getvalue())
    else:
        _emit(args, _json(args, {
            "enclosures": [{"n": n, "lo": rat_to_decimal(rows[n].lo, d),
                            "hi": rat_to_decimal(rows[n].hi, d, upward=True)} for n in ns],
            "delta_star": [rat_to_decimal(star.lo, d), rat_to_decimal(star.hi, d, upward=True)],
            "strictly_increasing": rep.increasing, "below_delta_star": rep.below_star,
        }))
    if not rep.ok:
        log.error("monotonicity not certified (increasing=%s, below_star=%s)", rep.increasing, rep.below_star)
        return EXIT_CERT
    return EXIT_OK


def _parse_orbit_data(n: int, text: str):
    from arithdeg.spectral import orbit_data_from_chains

    try:
        lengths_s, ends_s = text.split(":")
        lengths = [int(t) for t in lengths_s.split(",")]
        ends = [int(t) for t in ends_s.split(",")]
        return orbit_data_from_chains(n, lengths, ends, label=text)
    except ValueError as exc:
        raise InputError(f"bad --orbit-data {text!r} (want 'l1,l2,l3:e1,e2,e3'): {exc}") from None


def cmd_picard(args) -> int:
    from arithdeg.spectral import (IsometryError, char_poly, chi, delta, geometric_orbit_data, picard_matrix,
                                   search_orbit_data, spectral_radius, strip_cyclotomic)

    n = args.n
    if n < 10:
        raise InputError("picard needs n >= 10")
    searched = None
    if args.search:
        searched = search_orbit_data(n)
        if not searched.accepted:
            _emit(args, _json(args, {"accepted": [], "rejected": [[d.describe(), r] for d, r in searched.rejected]}))
            return EXIT_CERT
        data = searched.accepted[0]
    elif args.orbit_data:
        data = _parse_orbit_data(n, args.orbit_data)
    else:
        data = geometric_orbit_data(n)
    try:
        P = picard_matrix(n, data)
    except IsometryError as exc:
        log.error("%s", exc)
        _emit(args, _json(args, {"orbit_data": data.describe(), "isometry": False, "error": str(exc)}))
        return EXIT_CERT
    cp = char_poly(P.rows())
    target, _ = strip_cyclotomic(chi(n).poly)
    _, rem = cp.divmod(target)
    rho = spectral_radius(P.rows(), args.eps, method=args.method, prec=args.prec)
    dn = delta(n, args.eps)
    d = args.digits
    same = rho.overlaps(dn) and abs(rho.mid - dn.mid) <= args.eps * 2
    res = {
        "orbit_data": data.describe(),
        "matrix": P.rows(),
        "char_poly": str(cp),
        "chi_n": str(chi(n).poly),
        "divisible_by_noncyclotomic_factor": rem.is_zero(),
        "spectral_radius": [rat_to_decimal(rho.lo, d), rat_to_decimal(rho.hi, d, upward=True)],
        "delta_n": [rat_to_decimal(dn.lo, d), rat_to_decimal(dn.hi, d, upward=True)],
        "radius_matches_delta": bool(same),
    }
    if searched is not None:
        res["accepted"] = [x.describe() for x in searched.accepted]
        res["rejected"] = [[x.describe(), r] for x, r in searched.rejected]
    _emit(args, _json(args, res))
    return EXIT_OK if rem.is_zero() and same else EXIT_CERT


def _solve_one(job):
    from arithdeg.vsolve import solve_params

    n, prec, grid, box, csamples, seed, samples, lift = job
    t0 = time.perf_counter()
    rep = solve_params(n, prec, grid=grid, box=box, complex_samples=csamples, seed=seed,
                       basin_samples=samples, lift=lift)
    return n, rep.to_json(), time.perf_counter() - t0


def cmd_solve_params(args) -> int:
    ns = args.n
    if any(n < 10 for n in ns):
        raise InputError("solve-params needs n >= 10")
    prec = args.prec or default_prec()
    jobs = [(n, prec, args.grid, args.box, args.complex_starts, args.seed, args.samples, args.lift) for n in ns]
    if args.jobs > 1 and len(ns) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            done = list(ex.map(_solve_one, jobs))
    else:
        done = [_solve_one(j) for j in jobs]
    for n, res, dt in done:
        log.info("n=%d: %s in %.1fs", n, res["certificate_status"], dt)
    _emit(args, _json(args, [res for _, res, _ in done]))
    return EXIT_OK if all(res["certificate_status"] == "certified" for _, res, _ in done) else EXIT_CERT


def cmd_certify(args) -> int:
    from arithdeg.exactnum.bigfloat import context
    from arithdeg.spectral import delta
    from arithdeg.vsolve import ParamSolution, certify_cusp, choose_radius, closure_system, solve_newton

    try:
        with open(args.solution, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read solution file: {exc}") from None
    # accept a bare solution, a solve-params report, or the CLI's wrapped output
    if isinstance(data, dict) and "result" in data:
        data = data["result"]
    if isinstance(data, list):
        data = data[0]
    sol_data = data.get("solution", data)
    try:
        n, target = int(sol_data["n"]), int(sol_data["target_index"])
        a_txt, b_txt = str(sol_data["a"]), str(sol_data["b"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"solution file lacks n/target_index/a/b: {exc}") from None
    prec = args.prec or int(sol_data.get("precision_bits", default_prec()))
    ctx = context(prec)
    start = (complex(ctx.mpmathify(a_txt)), complex(ctx.mpmathify(b_txt)))
    sols = solve_newton(closure_system(n, target), [start], prec)
    if not sols:
        _emit(args, _json(args, {"status": "no admissible solution near the stored values",
                                 "diagnostics": sols.diagnostics}))
        return EXIT_CERT
    sol: ParamSolution = sols[0]
    D = delta(n, Fraction(1, 10**40))
    cert = certify_cusp(sol, D, prec)
    res = {"solution": sol.to_json(), "certificate": cert.to_json()}
    ok = cert.passed
    if cert.passed:
        rep = choose_radius(sol, cert, Fraction(args.radius), samples=args.samples, seed=args.seed)
        cert.contraction = rep.to_json()
        res["basin"] = rep.to_json()
        ok = rep.passed
    _emit(args, _json(args, res))
    return EXIT_OK if ok else EXIT_CERT


def cmd_verify_remark(args) -> int:
    from arithdeg.rationalmap import restriction_check

    rep = restriction_check(args.trials, args.seed, args.max_height)
    _emit(args, _json(args, rep.to_json()))
    log.info("%d/%d points preserved C=0 and matched f4", min(rep.invariant, rep.matches), rep.trials)
    return EXIT_OK if rep.passed else EXIT_CERT


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="arithdeg", description="Heights, degrees and dynamical-degree certificates.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt="json"):
        sp.add_argument("--out", help="write the artifact here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--prec", type=_positive_int, default=None,
                        help="working precision in bits (default from ARITHDEG_PREC or 256)")
        sp.add_argument("--seed", type=int, default=0)

    def map_args(sp):
        sp.add_argument("--map", default="builtin:f4", help="builtin:NAME or a map JSON file")
        sp.add_argument("--param", action="append", help="fiber parameter, e.g. a=1/2 (repeatable)")

    sp = sub.add_parser("orbit", help="exact orbit with Weil heights")
    common(sp, "csv")
    map_args(sp)
    sp.add_argument("--point", required=True, help="colon-separated rationals")
    sp.add_argument("--nmax", type=_positive_int, default=12)
    sp.add_argument("--max-height-bits", type=_positive_int, default=1 << 22)
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("alpha", help="arithmetic-degree estimate along an orbit")
    common(sp)
    map_args(sp)
    sp.add_argument("--point", required=True)
    sp.add_argument("--nmax", type=_positive_int, default=12)
    sp.add_argument("--window", type=_positive_int, default=5)
    sp.add_argument("--tol", type=_positive_rat, default=Fraction(1, 50))
    sp.add_argument("--max-height-bits", type=_positive_int, default=1 << 22)
    sp.set_defaults(func=cmd_alpha)

    sp = sub.add_parser("degseq", help="degrees of the iterates")
    common(sp, "csv")
    map_args(sp)
    sp.add_argument("--K", type=_positive_int, default=8)
    sp.add_argument("--max-terms", type=_positive_int, default=400_000)
    sp.add_argument("--max-ops", type=_positive_int, default=60_000_000)
    sp.set_defaults(func=cmd_degseq)

    sp = sub.add_parser("delta", help="certified enclosures of delta_n")
    common(sp, "csv")
    sp.add_argument("--from", type=int, default=10)
    sp.add_argument("--to", type=int, default=60)
    sp.add_argument("--eps", type=_positive_rat, default=Fraction(1, 10**8))
    sp.add_argument("--digits", type=_positive_int, default=15)
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_delta)

    sp = sub.add_parser("picard", help="Picard action, characteristic polynomial, spectral radius")
    common(sp)
    sp.add_argument("--n", type=int, default=10)
    sp.add_argument("--orbit-data", help="'l1,l2,l3:e1,e2,e3' orbit lengths and end points")
    sp.add_argument("--search", action="store_true", help="search all candidate orbit data")
    sp.add_argument("--eps", type=_positive_rat, default=Fraction(1, 10**12))
    sp.add_argument("--method", choices=("auto", "charpoly", "power"), default="auto")
    sp.add_argument("--digits", type=_positive_int, default=15)
    sp.set_defaults(func=cmd_picard)

    sp = sub.add_parser("solve-params", help="recover and certify (a_n, b_n)")
    common(sp)
    sp.add_argument("--n", type=int, nargs="+", default=[10])
    sp.add_argument("--grid", type=_positive_int, default=25)
    sp.add_argument("--box", type=float, default=3.0)
    sp.add_argument("--complex-starts", type=int, default=200)
    sp.add_argument("--samples", type=_positive_int, default=200, help="basin samples")
    sp.add_argument("--lift", action="store_true", help="try integer-relation minpoly recovery")
    sp.add_argument("--jobs", type=_positive_int, default=1)
    sp.set_defaults(func=cmd_solve_params)

    sp = sub.add_parser("certify", help="certify a stored solution")
    common(sp)
    sp.add_argument("--solution", required=True, help="JSON from solve-params")
    sp.add_argument("--radius", default="1/100")
    sp.add_argument("--samples", type=_positive_int, default=200)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify-remark", help="g5 restricted to C = 0 is f4")
    common(sp)
    sp.add_argument("--trials", type=_positive_int, default=100)
    sp.add_argument("--max-height", type=_positive_int, default=1000)
    sp.set_defaults(func=cmd_verify_remark)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        log.error("resource limit: %s", exc)
        return EXIT_LIMIT


if __name__ == "__main__":
    sys.exit(main())
