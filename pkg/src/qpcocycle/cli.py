"""Command-line entry point: subcommands mirror the library operations.

Examples
--------
qpcocycle lyapunov --alpha-cf golden --potential amo:2.0 --energy 0.0 --n 2000
qpcocycle acceleration --potential amo:3.0 --energy mid --n 2000
qpcocycle duality --potential amo:2.0 --p 5 --q 12 --epsilon 0.05
qpcocycle haro-puig --potential amo:2.0 --energy mid --epsilon 0.05 --n 4000
qpcocycle demo-ar --potential amo:0.5 --energy mid
qpcocycle suite identities
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .harness import (ExperimentManifest, GOLDEN_MEAN, SQRT2_FRAC, default_cache_dir,
                      mid_spectrum_energy, run, suite)
from .potentials import potential_from_config


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--alpha", type=float, default=None, help="frequency in (0,1)")
    sp.add_argument("--alpha-cf", choices=["golden", "sqrt2", "decimal"], default="golden")
    sp.add_argument("--alpha-decimal", type=str, default=None,
                    help="decimal alpha when --alpha-cf decimal")
    sp.add_argument("--potential", type=str, default="amo:2.0",
                    help="amo:LAMBDA | pamo:LAMBDA,NU,W.json | file.json")
    sp.add_argument("--energy", type=str, default="0.0",
                    help="RE[,IM], or 'mid[:QUANTILE]' for a finite-volume quantile")
    sp.add_argument("--epsilon", type=float, default=0.0)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--grid", type=int, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", action="append", default=[], metavar="KEY=VAL")
    sp.add_argument("--out", type=str, default=None)
    sp.add_argument("--cache", type=str, default=None)
    sp.add_argument("--no-cache", action="store_true")


def _alpha_value(args) -> float:
    if args.alpha is not None:
        return args.alpha
    if args.alpha_cf == "golden":
        return GOLDEN_MEAN
    if args.alpha_cf == "sqrt2":
        return SQRT2_FRAC
    if args.alpha_decimal is None:
        raise SystemExit("--alpha-cf decimal needs --alpha-decimal")
    return float(args.alpha_decimal)


def _energy_value(args, alpha: float):
    if args.energy.startswith("mid"):
        quant = float(args.energy.split(":", 1)[1]) if ":" in args.energy else 0.5
        v = potential_from_config(args.potential)
        return mid_spectrum_energy(alpha, v, quantile=quant)
    parts = args.energy.split(",")
    re_part = float(parts[0])
    if len(parts) > 1 and float(parts[1]) != 0.0:
        return [re_part, float(parts[1])]
    return re_part


def _tolerances(args) -> dict:
    out = {}
    for item in args.tol:
        key, val = item.split("=", 1)
        out[key] = float(val)
    return out


def _dispatch(task: str, params: dict, args) -> int:
    man = ExperimentManifest(task=task, params=params, seed=args.seed,
                             tolerances=_tolerances(args), output=args.out)
    rec = run(man, cache_dir=args.cache or default_cache_dir(),
              use_cache=not args.no_cache)
    print(json.dumps({"payload": rec.payload, "meta": rec.meta}, indent=2, default=str))
    verdict = rec.payload.get("pass")
    if verdict and any(v is False for v in verdict.values()):
        return 1
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="qpcocycle", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="cmd", required=True)

    for name in ["lyapunov", "acceleration", "duality", "haro-puig", "greens",
                  "localization", "demo-ar", "classify", "rotation-ids", "herman"]:
        sp = sub.add_parser(name)
        _add_common(sp)
        if name == "lyapunov":
            sp.add_argument("--side", default="scalar",
                            choices=["scalar", "dual_one_step", "dual_block"])
        if name == "duality":
            sp.add_argument("--p", type=int, required=True)
            sp.add_argument("--q", type=int, required=True)
            sp.add_argument("--theta", type=float, default=0.0)
            sp.add_argument("--what", default="conjugation",
                            choices=["conjugation", "chambers", "det-scalar",
                                     "det-dual", "det-periodic", "jensen"])
        if name == "haro-puig":
            sp.add_argument("--mode", default="direct", choices=["direct", "rational"])
        if name in ("greens", "localization", "demo-ar"):
            sp.add_argument("--theta", type=float, default=0.05)
        if name == "demo-ar":
            sp.add_argument("--windows", type=str, default="12,33,88")

    sp = sub.add_parser("suite")
    sp.add_argument("name", choices=["identities", "haro_puig", "localization",
                                     "appendixA"])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cache", type=str, default=None)
    sp.add_argument("--workers", type=int, default=1)

    args = ap.parse_args(argv)

    if args.cmd == "suite":
        rep = suite(args.name, cache_dir=args.cache or default_cache_dir(),
                    seed=args.seed, workers=args.workers)
        print(json.dumps(rep, indent=2, default=str))
        return 0 if rep["pass"] else 1

    alpha = _alpha_value(args)
    e_val = _energy_value(args, alpha)
    base = {"alpha": alpha, "potential": args.potential, "E": e_val,
            "epsilon": args.epsilon}
    if args.n:
        base["n"] = args.n
    if args.grid:
        base["grid"] = args.grid

    if args.cmd == "lyapunov":
        base["side"] = args.side
        return _dispatch("lyapunov", base, args)
    if args.cmd == "acceleration":
        return _dispatch("acceleration", base, args)
    if args.cmd == "classify":
        return _dispatch("classify_energy", base, args)
    if args.cmd == "duality":
        base.update({"p": args.p, "q": args.q, "theta": args.theta})
        task = {"conjugation": "duality_conjugation_residual", "chambers": "chambers",
                "det-scalar": "det_identity", "det-dual": "det_identity",
                "det-periodic": "det_identity", "jensen": "jensen"}[args.what]
        if args.what.startswith("det-"):
            base["kind"] = args.what.split("-", 1)[1]
        return _dispatch(task, base, args)
    if args.cmd == "haro-puig":
        base["mode"] = args.mode
        return _dispatch("haro_puig", base, args)
    if args.cmd == "greens":
        base["theta"] = args.theta
        return _dispatch("greens", base, args)
    if args.cmd == "localization":
        base["theta"] = args.theta
        base.setdefault("n_sites", args.n or 401)
        base.pop("n", None)
        return _dispatch("eigen_decay", base, args)
    if args.cmd == "demo-ar":
        base["windows"] = [int(w) for w in args.windows.split(",")]
        return _dispatch("demo_ar", base, args)
    if args.cmd == "rotation-ids":
        return _dispatch("rotation_ids", base, args)
    if args.cmd == "herman":
        return _dispatch("herman", base, args)
    raise SystemExit(f"unhandled command {args.cmd}")


if __name__ == "__main__":
    sys.exit(main())
