"""Command-line entry point ``iondecay``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 I/O failure.
"""

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from . import coupling_estimates, output, scenarios
from .errors import ConfigError, DomainError, NumericError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("iondecay")


def _report(res):
    for path in res.files:
        print(path)
    for line in res.lines:
        print(line)


def _run_config_file(path, mode=None):
    cfg = scenarios.ScenarioConfig.from_file(path)
    if mode is not None and cfg.mode != mode:
        raise ConfigError(f"{path}: expected mode {mode!r}, got {cfg.mode!r}", "mode")
    _report(scenarios.run_scenario(cfg))


def _run_preset(name, out_dir):
    return scenarios.run_scenario(scenarios.preset_config(name, out_dir)).files


def cmd_run(args):
    _run_config_file(args.config)


def cmd_langevin(args):
    _run_config_file(args.config, mode="langevin")


def cmd_vk_sweep(args):
    _run_config_file(args.config, mode="coupling_sweep")


def cmd_preset(args):
    for name in args.names:
        scenarios.preset_config(name, args.out)  # fail fast on unknown names
    if args.jobs > 1 and len(args.names) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_run_preset, args.names, [args.out] * len(args.names)))
    else:
        results = [_run_preset(name, args.out) for name in args.names]
    for files in results:
        for path in files:
            print(path)


def cmd_k1(args):
    print(f"x={output.fmt(args.x)}")
    print(f"k1={coupling_estimates.bessel_k1(args.x):.17g}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="iondecay",
        description="Trapped-ion decoherence from background-gas polarization.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run one or more figure presets")
    p.add_argument("names", nargs="+", choices=sorted(scenarios.PRESETS))
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="run presets in parallel")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("k1", help="evaluate the modified Bessel function K1")
    p.add_argument("--x", type=float, required=True)
    p.set_defaults(func=cmd_k1)

    p = sub.add_parser("langevin", help="Langevin capture estimates from a config")
    p.add_argument("config")
    p.set_defaults(func=cmd_langevin)

    p = sub.add_parser("vk-sweep", help="tabulate the gas coupling V_k over k")
    p.add_argument("config")
    p.set_defaults(func=cmd_vk_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
