"""Command-line entry point: ``pricevuln <subcommand> [flags]``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import pipeline
from .config import ConfigError, load_config, make_config
from .pipeline import StageError
from .pricing import PriceCurveError, load_price_curve, synthetic_curve, write_price_curve
from .profiles import IngestError, demo_mixture, ingest_csv, synthesize, write_profiles_csv

EXIT_OK, EXIT_INPUT, EXIT_PIPELINE = 0, 1, 2

_STAGE_COMMANDS = {
    "cluster": pipeline.stage_cluster,
    "price": pipeline.stage_price,
    "disguise": pipeline.stage_disguise,
    "zones": pipeline.stage_zones,
    "economics": pipeline.stage_economics,
    "sysload": pipeline.stage_sysload,
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON or YAML file with RunConfig keys")
    p.add_argument("--profiles", dest="profiles_path")
    p.add_argument("--prices", dest="prices_path")
    p.add_argument("--synthetic-prices", action="store_true", default=None,
                   help="use the built-in synthetic two-peak price curve")
    p.add_argument("--out", dest="output_dir")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--H", type=int)
    p.add_argument("--theta-start", type=float)
    p.add_argument("--theta-stop", type=float)
    p.add_argument("--theta-step", type=float)
    p.add_argument("--center-update", choices=["median", "mean"])
    p.add_argument("--switch-rule", choices=["pairwise", "strict"],
                   help="pairwise: closer to target than to home; strict: closer to target than to every center")
    p.add_argument("--benefit-basis", choices=["actual", "normalized"])
    p.add_argument("--disguise-extent", choices=["cr", "full"])
    p.add_argument("--u-max", type=float, help="utility satiation level (enables utility.csv)")
    p.add_argument("--discomfort", type=float, help="discomfort per unit l1 deviation")
    p.add_argument("--threads", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pricevuln",
        description="Clustering-based electricity pricing and its exposure to disguised load profiles.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    synth = sub.add_parser("synth", help="generate a synthetic demo dataset and price curve")
    synth.add_argument("--out", dest="output_dir", required=True)
    synth.add_argument("--n", type=int, default=3155, help="number of user-days")
    synth.add_argument("--prototypes", type=int, default=10)
    synth.add_argument("--sigma", type=float, default=0.15, help="additive noise, kWh/hour")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--H", type=int, default=24)
    synth.add_argument("-v", "--verbose", action="store_true")

    helps = {
        "validate": "schema-check the profiles and prices inputs; writes nothing",
        "cluster": "ingest profiles and fit the l1 clustering",
        "price": "price every cluster center against the price curve",
        "disguise": "minimal disguise effort (CR) per profile and trajectories",
        "zones": "sensitive-zone counts and stable radii over the theta grid",
        "economics": "bill-difference benefits and the benefit curve",
        "sysload": "system load and peak over the theta grid",
        "run": "full pipeline",
    }
    for name, text in helps.items():
        _common(sub.add_parser(name, help=text))
    return parser


def _config(args: argparse.Namespace):
    file_values = load_config(args.config) if args.config else None
    utility = None
    if args.u_max is not None or args.discomfort is not None:
        utility = dict((file_values or {}).get("utility") or {})
        if args.u_max is not None:
            utility["u_max"] = args.u_max
        if args.discomfort is not None:
            utility["c"] = args.discomfort
    return make_config(
        file_values,
        profiles_path=args.profiles_path,
        prices_path=args.prices_path,
        synthetic_prices=args.synthetic_prices,
        output_dir=args.output_dir,
        k=args.k,
        seed=args.seed,
        H=args.H,
        theta_start=args.theta_start,
        theta_stop=args.theta_stop,
        theta_step=args.theta_step,
        center_update=args.center_update,
        switch_rule=args.switch_rule,
        benefit_basis=args.benefit_basis,
        disguise_extent=args.disguise_extent,
        utility=utility,
        threads=args.threads,
    )


def cmd_synth(args: argparse.Namespace) -> int:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    spec = demo_mixture(args.n, args.prototypes, args.H, args.sigma, args.seed)
    data = synthesize(spec)
    write_profiles_csv(out / "profiles.csv", data)
    write_price_curve(out / "prices.csv", synthetic_curve(args.H))
    with (out / "labels.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["profile_id", "prototype"])
        w.writerows(zip(data.ids, data.labels))
    print(f"wrote {len(data)} synthetic profiles to {out}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if not cfg.profiles_path:
        raise ConfigError("validate needs --profiles")
    data = ingest_csv(cfg.profiles_path, cfg.H)
    print(f"profiles: {len(data)} valid, {len(data.rejected)} rejected")
    for row, reason in data.rejected[:20]:
        print(f"  row {row}: {reason}")
    if cfg.prices_path:
        curve = load_price_curve(cfg.prices_path, cfg.H)
        print(f"prices: {curve.H} hours, min {curve.prices.min():.6g}, max {curve.prices.max():.6g}")
    elif not cfg.synthetic_prices:
        print("prices: none given")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    manifest = pipeline.run(_config(args))
    c = manifest["counts"]
    print(f"{c['profiles']} profiles ({c['rejected']} rejected), k={c['k']}, "
          f"{c.get('finite_cr', 0)} can disguise at some effort")
    print(json.dumps(manifest["files"], indent=2))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "run":
            return cmd_run(args)
        cfg = _config(args)
        _STAGE_COMMANDS[args.command](cfg)
        print(f"{args.command}: outputs written to {cfg.output_dir}")
        return EXIT_OK
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ConfigError, IngestError, PriceCurveError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - surfaced as a pipeline failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
