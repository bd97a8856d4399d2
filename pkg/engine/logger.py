import json
import os
import sys
from typing import Any, Dict

from engine.settings import LOG_LEVELS, log_level


def log(message: str, level: str = "info") -> None:
    """
    Print a human-readable progress message to stderr.
    stdout is reserved for JSON reports, so nothing here ever goes there.
    """
    if LOG_LEVELS[level] <= log_level():
        print(message, file=sys.stderr)


def debug(message: str) -> None:
    log(message, "debug")


def render_report(report: Dict[str, Any]) -> str:
    """
    Deterministic JSON rendering: sorted keys, fixed indent, no timestamps.
    Identical reports always render to identical bytes.
    """
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def ensure_dir(path: str) -> None:
    if path and not os.path.exists(path):
        os.makedirs(path)


def write_report(report: Dict[str, Any], path: str) -> None:
    """
    Save a report to a JSON file. If file exists, it is overwritten.
    """
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(render_report(report))
    debug(f"📁 Report written: {path}")


def load_report(path: str) -> Dict[str, Any]:
    """
    Load a previously written report.
    """
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)
