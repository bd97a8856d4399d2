import argparse
import os
import sys
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from engine import __version__
from engine.commands import BaseCommand, CommandFactory, CommandOutcome
from engine.errors import InputError, PolynomialParseError, TdpkitError
from engine.logger import log, render_report, write_report
from engine.settings import get_setting
from engine.utils import load_json_file, validate_against_schema

MAX_SEED = 2 ** 64 - 1

# Raised while executing but still the input's fault
INPUT_ERRORS = (InputError, PolynomialParseError)


@dataclass
class JobSpec:
    command: str
    input_path: str
    output_path: Optional[str] = None
    seed: Optional[int] = None
    field: Optional[str] = None
    max_instances: Optional[int] = None

    @property
    def resolved_seed(self) -> int:
        return get_setting("seed", 0) if self.seed is None else self.seed


def build_report(job: JobSpec, outcome: Optional[CommandOutcome] = None,
                 error: Optional[TdpkitError] = None) -> Dict[str, Any]:
    """
    Report envelope shared by every command. Contains no timestamps or absolute
    paths, so identical jobs give identical bytes.
    """
    report = {
        "command": job.command,
        "version": __version__,
        "seed": job.resolved_seed,
        "status": "pass" if outcome is not None and outcome.passed else "fail",
        "input": os.path.basename(job.input_path),
        "field": outcome.field.to_json() if outcome is not None and outcome.field is not None else None,
        "result": outcome.result if outcome is not None else {},
    }
    if error is not None:
        report["error"] = error.to_dict()
    return report


def execute_job(job: JobSpec) -> Tuple[int, Optional[Dict[str, Any]]]:
    """
    (exit code, report). Exit 2 carries no report: the diagnostic goes to stderr.
    """
    command: BaseCommand = CommandFactory.create_command(
        job.command, seed=job.resolved_seed, field_literal=job.field,
        out_path=job.output_path, max_instances=job.max_instances,
    )
    try:
        data, text = load_json_file(job.input_path)
        validate_against_schema(data, command.schema, text)
        parsed = command.parse(data)
    except InputError as e:
        log(f"❌ {job.input_path}: {e.diagnostic()}", "quiet")
        return 2, None
    except TdpkitError as e:
        log(f"❌ {job.input_path}: {e}", "quiet")
        return 2, None

    try:
        outcome = command.execute(parsed)
    except INPUT_ERRORS as e:
        log(f"❌ {job.input_path}: {e}", "quiet")
        return 2, None
    except TdpkitError as e:
        log(f"⚠️ {job.command} stopped: {e.__class__.__name__}: {e}")
        return 1, build_report(job, error=e)

    if outcome.passed:
        log(f"✅ {job.command} passed")
    else:
        log(f"❌ {job.command} failed")
    return (0 if outcome.passed else 1), build_report(job, outcome)


def run(job: JobSpec) -> int:
    code, report = execute_job(job)
    if report is None:
        return code
    # corpus uses --out as its directory, so its report always goes to stdout
    if job.output_path and job.command != "corpus":
        write_report(report, job.output_path)
    else:
        sys.stdout.write(render_report(report))
    return code


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdpkit",
        description="Exact verification, analysis and construction of tridiagonal pairs.",
    )
    parser.add_argument("command", choices=CommandFactory.get_available_commands())
    parser.add_argument("input", help="JSON input file (a grid file for corpus)")
    parser.add_argument("--out", default=None, help="Report path; the output directory for corpus")
    parser.add_argument("--seed", type=_seed, default=None)
    parser.add_argument("--field", default=None, help="rational or gf:p, used when the input has no field")
    parser.add_argument("--max-instances", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = JobSpec(args.command, args.input, args.out, args.seed, args.field, args.max_instances)
    return run(job)


if __name__ == "__main__":
    sys.exit(main())
