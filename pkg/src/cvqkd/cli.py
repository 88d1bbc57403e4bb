"""Command-line front end.

Every command writes a JSON envelope to stdout: the command echo (replayable),
resolved parameters, seed, engine versions, results and provenance notes.
Exit codes: 0 success, 2 usage, 3 I/O, 4 domain or degenerate gain.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, _kernel
from .bounds import (
    ChannelParams,
    coherent_bob_bound,
    coherent_penalty,
    lossy_bob_bound,
    single_quanta_curve,
    squeezed_eve_bound,
    squeezed_penalty,
    tradeoff_curve,
)
from .errors import CVQKDError
from .numeric import db_to_linear, linear_to_db
from .quadrature import ber_from_snr, snr_for_ber
from .session import SessionParams, agreement, predict, run_session
from .strategies import parse_strategy
from .teleport import (
    bob_penalty,
    classical_channel_penalty,
    lambda_opt,
    squeezing_parameter,
)

EXIT_USAGE, EXIT_IO, EXIT_DOMAIN = 2, 3, 4
DEFAULT_BER_ANCHOR = 0.01
SINGLE_QUANTA_NOTE = "single-quanta reference is the intercept-resend fraction model, an approximation"
PRINTED_FORM_NOTE = "printed-form bounds (4 V_n, 1/(4 V_n)) active; not consistent with the penalty relations"


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _envelope(argv, params, results, notes, seed=None, kernel=False) -> dict:
    engine = {"cvqkd": __version__}
    if kernel:
        engine["kernel"] = _kernel.BACKEND
    return _clean(
        {
            "command": ["cvqkd", *argv],
            "parameters": params,
            "seed": seed,
            "engine": engine,
            "results": results,
            "provenance": notes,
        }
    )


def _base_snr(args) -> float:
    if args.snr_db is None:
        return snr_for_ber(DEFAULT_BER_ANCHOR)
    return db_to_linear(args.snr_db)


def _snr_note(args) -> str:
    if args.snr_db is None:
        return f"base SNR fixed by BER anchor {DEFAULT_BER_ANCHOR}: {linear_to_db(_base_snr(args)):.4f} dB"
    return f"base SNR {args.snr_db} dB from --snr-db"


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_bounds(args, argv, parser) -> dict:
    s = _base_snr(args)
    notes = [_snr_note(args)]
    if not 0.0 < args.eta <= 1.0:
        parser.error("--eta must lie in (0, 1]")
    # v_b is the penalty Eve causes; the line loss share is removed
    loss_noise = (1.0 - args.eta) / args.eta
    if args.protocol == "coherent":
        if args.vn is not None or args.printed_form:
            parser.error("--vn and --printed-form apply only to --protocol squeezed")
        t_e_max = 0.5
        t_e = t_e_max if args.te is None else args.te
        t_b = coherent_bob_bound(t_e, args.eta)
        extractable = True
        v_e = coherent_penalty(t_e) if t_e > 0 else math.inf
        v_b = coherent_penalty(t_b) - loss_noise
    else:
        vn = 0.05 if args.vn is None else args.vn
        t_e_max = squeezed_eve_bound(vn)
        t_e = t_e_max if args.te is None else args.te
        t_b, extractable = lossy_bob_bound(vn, t_e, args.eta, printed_form=args.printed_form)
        v_e = squeezed_penalty(vn, t_e) if t_e > 0 else math.inf
        v_b = squeezed_penalty(vn, t_b) - loss_noise if t_b > 0 else math.inf
        if args.printed_form:
            notes.append(PRINTED_FORM_NOTE)
    params = {
        "protocol": args.protocol,
        "vn": None if args.protocol == "coherent" else (0.05 if args.vn is None else args.vn),
        "te": args.te,
        "eta": args.eta,
        "printed_form": args.printed_form,
        "base_snr": s,
    }
    results = {
        "t_e_max": t_e_max,
        "t_e": t_e,
        "t_b_max": t_b,
        "bob_extractable": extractable,
        "v_e": v_e,
        "v_b": v_b,
        "eve_ber": ber_from_snr(t_e * s),
        "bob_ber": ber_from_snr(t_b * s),
    }
    return _envelope(argv, params, results, notes)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def cmd_curve(args, argv, parser) -> dict:
    s = _base_snr(args)
    out = Path(args.out)
    notes = [_snr_note(args)]
    if args.printed_form:
        notes.append(PRINTED_FORM_NOTE)
    vns = [None] if args.protocol == "coherent" else args.vn_list
    files = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        for vn in vns:
            for eta in args.eta_list:
                curve = tradeoff_curve(
                    args.protocol,
                    ChannelParams(eta, 0.05 if vn is None else vn),
                    s,
                    args.points,
                    printed_form=args.printed_form,
                )
                name = f"{args.protocol}_eta{eta:g}.csv" if vn is None else f"squeezed_vn{vn:g}_eta{eta:g}.csv"
                path = out / name
                with path.open("w", newline="") as fh:
                    w = csv.writer(fh, lineterminator="\n")
                    w.writerow(["eve_ber", "bob_ber", "t_e", "t_b", "v_e"])
                    for p in curve.points:
                        w.writerow([_fmt(p.eve_ber), _fmt(p.bob_ber), _fmt(p.t_e), _fmt(p.t_b), _fmt(p.v_e)])
                end = curve.points[-1]
                files.append(
                    {
                        "path": name,
                        "vn": vn,
                        "eta": eta,
                        "rows": len(curve.points),
                        "endpoint": {"eve_ber": end.eve_ber, "bob_ber": end.bob_ber, "t_e": end.t_e, "t_b": end.t_b},
                        "baseline_bob_ber": curve.baseline_bob_ber,
                    }
                )
        if args.single_quanta:
            path = out / "single_quanta.csv"
            with path.open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["eve_ber", "bob_ber", "intercept_fraction"])
                for f, eve, bob in single_quanta_curve(args.points):
                    w.writerow([_fmt(eve), _fmt(bob), _fmt(f)])
            files.append({"path": "single_quanta.csv", "rows": args.points})
            notes.append(SINGLE_QUANTA_NOTE)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc
    params = {
        "protocol": args.protocol,
        "vn_list": None if args.protocol == "coherent" else args.vn_list,
        "eta_list": args.eta_list,
        "points": args.points,
        "base_snr": s,
        "printed_form": args.printed_form,
        "single_quanta": args.single_quanta,
    }
    # paths are reported relative to --out so the payload does not depend on cwd
    return _envelope(argv, params, {"files": files}, notes)


def _default_seed(parser) -> int:
    env = os.environ.get("CVQKD_SEED")
    if env is None:
        return 0
    try:
        seed = int(env, 0)
    except ValueError:
        parser.error(f"CVQKD_SEED must be an integer, got {env!r}")
    if not 0 <= seed < 1 << 64:
        parser.error(f"CVQKD_SEED must be a 64-bit unsigned integer, got {env!r}")
    return seed


def cmd_simulate(args, argv, parser) -> dict:
    seed = _default_seed(parser) if args.seed is None else args.seed
    strategy = parse_strategy(args.strategy)
    params = SessionParams(
        protocol=args.protocol,
        n_symbols=args.symbols,
        base_snr=_base_snr(args),
        vn=args.vn,
        channel_eta=args.eta,
        seed=seed,
        strategy=strategy,
    )
    report = run_session(params, workers=args.workers)
    pred = predict(params)
    agree = agreement(report)
    results = report.to_dict()
    results.pop("params")
    results["analytic"] = {"ber_alice_bob": pred.ber_alice_bob, "ber_alice_eve": pred.ber_alice_eve}
    results["agreement_3sigma"] = agree
    results["pass"] = all(agree.values())
    p = {
        "protocol": params.protocol,
        "strategy": str(strategy),
        "symbols": params.n_symbols,
        "base_snr": params.base_snr,
        "vn": params.vn if params.protocol == "squeezed" else None,
        "eta": params.channel_eta,
    }
    if "--seed" not in argv:
        argv = [*argv, "--seed", str(seed)]
    return _envelope(argv, p, results, [_snr_note(args)], seed=seed, kernel=True)


def cmd_teleport(args, argv, parser) -> dict:
    g = args.pump_gain
    v_e = classical_channel_penalty(g)
    lam_o = lambda_opt(g) if args.gain_lambda is None or g > 1.0 else None
    lam = lam_o if args.gain_lambda is None else args.gain_lambda
    v_b = bob_penalty(g, lam)
    results = {
        "v_e": v_e,
        "v_sq": squeezing_parameter(g),
        "lambda_opt": lam_o,
        "lambda": lam,
        "v_b": v_b,
        "product": v_e * v_b,
    }
    return _envelope(argv, {"pump_gain": g, "lambda": args.gain_lambda}, results, [])


class _IOFailure(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cvqkd", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cvqkd {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def snr_flag(p):
        p.add_argument("--snr-db", type=float, default=None, help="base SNR in dB (default: BER 1%% anchor, 13.36 dB)")

    b = sub.add_parser("bounds", help="transfer-coefficient bounds and implied BERs")
    b.add_argument("--protocol", choices=("coherent", "squeezed"), default="coherent")
    b.add_argument("--vn", type=float, default=None, help="squeezed noise floor V_n")
    b.add_argument("--te", type=float, default=None, help="Eve's transfer (default: her maximum)")
    b.add_argument("--eta", type=float, default=1.0, help="line transmission")
    b.add_argument("--printed-form", action="store_true", help="use the printed 4 V_n / 1/(4 V_n) bounds")
    snr_flag(b)
    b.set_defaults(func=cmd_bounds)

    c = sub.add_parser("curve", help="write Eve/Bob BER trade-off curves as CSV")
    c.add_argument("--protocol", choices=("coherent", "squeezed"), default="squeezed")
    c.add_argument("--vn-list", type=_float_list, default=[0.05])
    c.add_argument("--eta-list", type=_float_list, default=[1.0])
    c.add_argument("--points", type=int, default=200)
    c.add_argument("--out", default="curves")
    c.add_argument("--single-quanta", action="store_true", help="also write the single-photon reference")
    c.add_argument("--printed-form", action="store_true")
    snr_flag(c)
    c.set_defaults(func=cmd_curve)

    s = sub.add_parser("simulate", help="Monte Carlo protocol session")
    s.add_argument("--protocol", choices=("coherent", "squeezed"), default="coherent")
    s.add_argument("--strategy", default="none", help="none|guess|split|tap:F|teleport:G[,lambda]")
    s.add_argument("--symbols", type=int, default=1_000_000)
    s.add_argument("--seed", type=int, default=None, help="default: $CVQKD_SEED or 0")
    s.add_argument("--vn", type=float, default=0.05)
    s.add_argument("--eta", type=float, default=1.0)
    s.add_argument("--workers", type=int, default=1)
    snr_flag(s)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("teleport", help="teleportation eavesdropper penalties")
    t.add_argument("--pump-gain", type=float, required=True)
    t.add_argument("--lambda", dest="gain_lambda", type=float, default=None)
    t.set_defaults(func=cmd_teleport)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "points", 2) < 2:
            parser.error("--points must be at least 2")
        envelope = args.func(args, argv, parser)
    except SystemExit as exc:
        return int(exc.code or 0)
    except _IOFailure as exc:
        print(f"cvqkd: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except CVQKDError as exc:
        print(f"cvqkd: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    json.dump(envelope, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
