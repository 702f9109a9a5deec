"""Command line entry point.

Exit codes: 0 success, 1 input error, 2 certificate violation.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .dyadic import resolution, signal_from_json, signal_to_json
from .experiments import (cww_scan, lower_bound_lerner, q_scaling_table, rows_to_csv,
                          scan_family, weighted_trials, zygmund_scan)
from .multipliers import AtomRq1, apply, multiplier_from_json
from .sparse import sparse_certify_lambda, sparse_certify_multiplier
from .walsh import haar_forward, haar_inverse, spectrum_from_json, spectrum_to_json, walsh_forward, walsh_inverse


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n"


def _default(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not serializable: {type(x).__name__}")


def _signal(path: str, N: int | None) -> np.ndarray:
    try:
        f = signal_from_json(_read_json(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: malformed signal ({exc})") from exc
    if N is not None and resolution(f) != N:
        raise InputError(f"{path}: resolution {resolution(f)} differs from --N {N}")
    return f


def _multiplier(path: str):
    try:
        return multiplier_from_json(_read_json(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"{path}: malformed multiplier ({exc})") from exc


def cmd_transform(args) -> int:
    obj = _read_json(args.inp)
    if args.inverse:
        if args.haar:
            try:
                coeffs = [np.asarray(c, dtype=float) for c in obj["coeffs"]]
                f = haar_inverse(float(obj["mean"]), coeffs)
            except (KeyError, ValueError, TypeError) as exc:
                raise InputError(f"malformed Haar spectrum ({exc})") from exc
        else:
            try:
                f = walsh_inverse(spectrum_from_json(obj))
            except (KeyError, ValueError, TypeError) as exc:
                raise InputError(f"malformed spectrum ({exc})") from exc
        if args.N is not None and resolution(f) != args.N:
            raise InputError(f"resolution {resolution(f)} differs from --N {args.N}")
        _write(args.out, _dump(signal_to_json(f)))
        return 0
    f = _signal(args.inp, args.N)
    if args.haar:
        mean, coeffs = haar_forward(f)
        out = {"N": resolution(f), "mean": mean, "coeffs": [c.tolist() for c in coeffs]}
    else:
        out = spectrum_to_json(walsh_forward(f))
    _write(args.out, _dump(out))
    return 0


def cmd_apply(args) -> int:
    f = _signal(args.inp, args.N)
    m = _multiplier(args.multiplier)
    try:
        g = apply(m, f)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(args.out, _dump(signal_to_json(g)))
    return 0


def cmd_certify_multiplier(args) -> int:
    f = _signal(args.f, args.N)
    phi = _signal(args.phi, args.N)
    if resolution(phi) != resolution(f):
        raise InputError("f and phi have different resolutions")
    m = _multiplier(args.multiplier)
    if not isinstance(m, AtomRq1):
        raise InputError("certification needs an atom; atomize the symbol first")
    try:
        cert = sparse_certify_multiplier(f, phi, m, args.q, threshold=args.threshold)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(args.out, _dump(cert.to_json()))
    return 0 if cert.ok else 2


def cmd_certify_square(args) -> int:
    f = _signal(args.f, args.N)
    g = _signal(args.g, args.N)
    if resolution(g) != resolution(f):
        raise InputError("f and g have different resolutions")
    try:
        cert = sparse_certify_lambda(f, g, args.lam, args.r, threshold=args.threshold)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(args.out, _dump(cert.to_json()))
    return 0 if cert.ok else 2


def cmd_lowerbound(args) -> int:
    try:
        rep = lower_bound_lerner(args.n, args.N)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(args.out, _dump(rep.to_dict()))
    return 0


def cmd_scan(args) -> int:
    cfg = _read_json(args.config) if args.config else {}
    N = args.N or int(cfg.get("N", 10))
    seed = int(cfg.get("seed", 0))
    try:
        if args.kind == "zygmund":
            lac = cfg.get("lacunary", [1 << k for k in range(N)])
            text = zygmund_scan(lac, scan_family(N, seed), seed).to_csv()
        elif args.kind == "cww":
            text = cww_scan(scan_family(N, seed, mean_zero=True), seed).to_csv()
        elif args.kind == "qscaling":
            rows = q_scaling_table(int(cfg.get("trials", 10)), tuple(cfg.get("q_grid", (1.1, 1.25, 1.5, 2.0))),
                                   N, seed, tuple(cfg.get("ns", (4, 6, 8))))
            text = rows_to_csv(rows)
        else:
            scans = weighted_trials(N, float(cfg.get("p", 2.5)), tuple(cfg.get("lambdas", (2, 3))),
                                    float(cfg.get("constant", 1.0)), seed)
            rows = []
            for op, scan in scans.items():
                for r in scan.rows:
                    rows.append({"operator": op, "weight_id": r["weight_id"],
                                 "characteristic": r["characteristic"], "ratio": r["ratio"],
                                 "ceiling": r["ceiling"], "fitted_exponent": scan.fitted_exponent})
            text = rows_to_csv(rows)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write(args.out, text)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run

    results = run(args.level, args.N or 10)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name:<18} {r.seconds:6.2f}s  {r.detail}")
    return 0 if all(r.passed for r in results) else 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="walshlab", description="Walsh-Fourier sparse domination laboratory")
    p.add_argument("--N", type=int, default=None, help="resolution shared by all inputs")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("transform", help="Walsh or Haar transform of a signal")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--inverse", action="store_true")
    s.add_argument("--haar", action="store_true")
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("apply", help="apply a Walsh multiplier")
    s.add_argument("--multiplier", required=True)
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("certify-multiplier", help="sparse certificate for <T_m f, phi>")
    s.add_argument("--f", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--multiplier", required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--threshold", type=float, default=4.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_certify_multiplier)

    s = sub.add_parser("certify-square", help="sparse certificate for <(S_lambda f)^r, g>")
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--lambda", dest="lam", type=int, required=True)
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--threshold", type=float, default=4.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_certify_square)

    s = sub.add_parser("lowerbound", help="the extremal pair near L^1")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lowerbound)

    s = sub.add_parser("scan", help="Zygmund, CWW, q-scaling or weighted scans")
    s.add_argument("--kind", choices=["zygmund", "cww", "qscaling", "weights"], required=True)
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_scan)

    s = sub.add_parser("selftest", help="run the invariant suites")
    s.add_argument("--level", choices=["quick", "exhaustive"], default="quick")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    if args.N is not None and not 1 <= args.N <= 24:
        print("error: --N must lie in [1, 24]", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
