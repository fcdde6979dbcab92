"""Command line entry point: ``cudmcmc {vrf,discrepancy,couple} --config C --out O``.

Exit codes: 0 success, 2 configuration error, 3 chain error, 4 stream exhausted.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, DomainError, InvalidState, StreamExhausted
from .experiments import (COUPLING_COLUMNS, DISCREPANCY_COLUMNS, ExperimentConfig,
                          run_coupling_report, run_discrepancy_report, run_vrf_experiment,
                          write_rows_csv, write_vrf_csv)

OK, CONFIG_ERROR, CHAIN_ERROR, EXHAUSTED = 0, 2, 3, 4

log = logging.getLogger("cudmcmc")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cudmcmc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "vrf": "variance reduction factors, randomized CUD against IID",
        "discrepancy": "star discrepancy of stream tuples against IID references",
        "couple": "coupling and contraction probes",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, help="JSON experiment config")
        sp.add_argument("--out", help="CSV output path (defaults to the config's 'out')")
        sp.add_argument("--seed", type=int, help="override the master seed")
    return p


def run(command: str, config: ExperimentConfig, out: str) -> None:
    if command == "vrf":
        write_vrf_csv(out, run_vrf_experiment(config), config.model)
    elif command == "discrepancy":
        write_rows_csv(out, DISCREPANCY_COLUMNS, run_discrepancy_report(config))
    else:
        write_rows_csv(out, COUPLING_COLUMNS, run_coupling_report(config))


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    args = _parser().parse_args(argv)
    try:
        config = ExperimentConfig.from_json(args.config)
        if args.seed is not None:
            config.seed = args.seed
        out = args.out or config.out
        if out is None:
            raise ConfigError("no output path: pass --out or set 'out' in the config")
        run(args.command, config, out)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return CONFIG_ERROR
    except StreamExhausted as exc:
        log.error("stream exhausted: %s", exc)
        return EXHAUSTED
    except (InvalidState, DomainError) as exc:
        log.error("chain error: %s", exc)
        return CHAIN_ERROR
    return OK


if __name__ == "__main__":
    sys.exit(main())
