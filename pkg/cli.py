"""
Command-line front end for evidassoc
Runs scenario files through the association pipeline and writes the report

    python cli.py run --scenario paper_section5.json --format text
    python cli.py generate --seed 7 --objects 4 --frames 10 --output walk.json
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from backend.errors import AssociationError, ScenarioError, TotalConflictError
from backend.report import build_report, dump_json, frame_report, render_text
from backend.run_logger import RunLogger
from backend.scenario import Scenario, generate_scenario, load_scenario
from backend.tracker import Tracker
from utils.config import APP_NAME, configure_logging, get_bundled_scenario_path

logger = logging.getLogger(APP_NAME)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TOTAL_CONFLICT = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for total conflict"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def run(scenario: Scenario, alpha0: Optional[float] = None, force_hungarian: bool = False,
        run_logger: Optional[RunLogger] = None) -> Dict:
    """Track every frame of the scenario and build the report"""
    config = scenario.tracker_config(alpha0)
    tracker = Tracker(config, [(k.label, k.quantity) for k in scenario.known])
    if run_logger:
        run_logger.initialize_log(scenario.name, scenario.dimensionality, config.alpha0,
                                  len(scenario.known), len(scenario.frames), force_hungarian)

    frames: List[Dict] = []
    for index, frame in enumerate(scenario.frames):
        labels = [p.label for p in frame.perceived]
        outcome = tracker.step(
            [p.quantity for p in frame.perceived],
            mass_grid=frame.mass_grid,
            labels=labels,
            force_hungarian=force_hungarian,
            dt=frame.dt,
        )
        entry = frame_report(index, outcome, labels)
        frames.append(entry)
        if run_logger:
            run_logger.log_frame(entry)
            for track_id in outcome.spawned:
                run_logger.log_event("Track spawned", {"frame": index, "id": track_id})
            for track_id in outcome.deleted:
                run_logger.log_event("Track deleted", {"frame": index, "id": track_id})

    report = build_report(scenario.name, scenario.dimensionality, config.alpha0, frames,
                          force_hungarian=force_hungarian)
    if run_logger:
        run_logger.log_final_results(report["summary"], [t.to_report() for t in tracker.tracks])
    return report


def _resolve_scenario(name: str) -> Path:
    path = Path(name)
    if path.exists():
        return path
    bundled = get_bundled_scenario_path(name)
    return bundled if bundled.exists() else path


def _write(text: str, output: Optional[str]):
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    if args.scenario:
        scenario = load_scenario(_resolve_scenario(args.scenario))
    elif args.seed is not None:
        scenario = generate_scenario(args.seed)
    else:
        raise ScenarioError("run needs --scenario or --seed")

    scenario = scenario.truncated(args.frames)
    run_logger = RunLogger(args.log_md) if args.log_md else None
    try:
        report = run(scenario, alpha0=args.alpha0, force_hungarian=args.force_hungarian,
                     run_logger=run_logger)
    except AssociationError as e:
        if run_logger:
            run_logger.log_event("Run failed", {"error": str(e)})
        raise

    text = dump_json(report) if args.format == "json" else render_text(report)
    _write(text, args.output)
    return EXIT_OK


def _cmd_generate(args) -> int:
    scenario = generate_scenario(args.seed, objects=args.objects, frames=args.frames,
                                 dimensionality=args.dimensionality)
    _write(json.dumps(scenario.to_dict(), indent=2) + "\n", args.output)
    return EXIT_OK


def _unit_interval(value: str) -> float:
    number = float(value)
    if not 0.0 <= number <= 1.0:
        raise argparse.ArgumentTypeError(f"{value} is not in [0, 1]")
    return number


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog=APP_NAME, description="Evidential multi-object association")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    run_cmd = commands.add_parser("run", help="Associate every frame of a scenario")
    run_cmd.add_argument("--scenario", help="Scenario file, or the name of a bundled scenario")
    run_cmd.add_argument("--format", choices=["json", "text"], default="json")
    run_cmd.add_argument("--alpha0", type=_unit_interval, default=None, help="Override source reliability")
    run_cmd.add_argument("--frames", type=int, default=None, help="Only run the first N frames")
    run_cmd.add_argument("--seed", type=int, default=None, help="Generate a random-walk scenario instead")
    run_cmd.add_argument("--force-hungarian", action="store_true",
                         help="Always solve the assignment, even when naive decisions agree")
    run_cmd.add_argument("--output", default=None, help="Write the report here instead of stdout")
    run_cmd.add_argument("--log-md", default=None, help="Also write a markdown run log")
    run_cmd.set_defaults(handler=_cmd_run)

    gen_cmd = commands.add_parser("generate", help="Write a seeded random-walk scenario")
    gen_cmd.add_argument("--seed", type=int, required=True)
    gen_cmd.add_argument("--objects", type=int, default=3)
    gen_cmd.add_argument("--frames", type=int, default=5)
    gen_cmd.add_argument("--dimensionality", type=int, choices=[1, 2], default=1)
    gen_cmd.add_argument("--output", default=None)
    gen_cmd.set_defaults(handler=_cmd_generate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except TotalConflictError as e:
        logger.error(f"Total conflict: {e}")
        return EXIT_TOTAL_CONFLICT
    except (ScenarioError, OSError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except AssociationError as e:
        logger.error(f"Association failed: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
