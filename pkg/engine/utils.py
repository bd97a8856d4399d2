import json
import os
import re
from functools import lru_cache
from typing import Any, Dict, List, Sequence, Tuple

from jsonschema import Draft7Validator

from engine.errors import InputError

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "..", "schemas")

_decoder = json.JSONDecoder()


def offset_to_line_column(text: str, offset: int) -> Tuple[int, int]:
    """1-based line and column of a character offset."""
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def load_json_file(path: str) -> Tuple[Any, str]:
    """
    Read a JSON input file. Returns (data, raw text); syntax errors become
    InputError with the decoder's line and column.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}")
    try:
        return json.loads(text), text
    except json.JSONDecodeError as e:
        raise InputError(f"invalid JSON: {e.msg}", e.lineno, e.colno)


def _skip_ws(text: str, i: int) -> int:
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


def json_positions(text: str) -> Dict[Tuple[Any, ...], int]:
    """Map every JSON path (tuple of keys / indices) to the offset where its value starts."""
    positions: Dict[Tuple[Any, ...], int] = {}

    def scan(i: int, path: Tuple[Any, ...]) -> int:
        i = _skip_ws(text, i)
        positions[path] = i
        if text[i] == "{":
            i = _skip_ws(text, i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = _decoder.raw_decode(text, _skip_ws(text, i))
                i = _skip_ws(text, i) + 1  # ':'
                i = _skip_ws(text, scan(i, path + (key,)))
                if text[i] == "}":
                    return i + 1
                i += 1  # ','
        if text[i] == "[":
            i = _skip_ws(text, i + 1)
            if text[i] == "]":
                return i + 1
            index = 0
            while True:
                i = _skip_ws(text, scan(i, path + (index,)))
                index += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = _decoder.raw_decode(text, i)
        return end

    scan(0, ())
    return positions


def locate_json_path(text: str, path: Sequence[Any]) -> Tuple[int, int]:
    """Line and column of the value at `path`, falling back to its nearest located parent."""
    positions = json_positions(text)
    path = tuple(path)
    while path not in positions and path:
        path = path[:-1]
    return offset_to_line_column(text, positions.get(path, 0))


@lru_cache(maxsize=None)
def load_schema(name: str) -> Dict[str, Any]:
    filename = os.path.join(SCHEMA_DIR, f"{name}.schema.json")
    if not os.path.exists(filename):
        raise FileNotFoundError(f"Schema file not found: {filename}")
    with open(filename, "r", encoding="utf-8") as f:
        return json.load(f)


def schema_errors(data: Any, schema_name: str) -> List[Any]:
    validator = Draft7Validator(load_schema(schema_name))
    return sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))


def validate_against_schema(data: Any, schema_name: str, text: str = None) -> None:
    """Raise InputError for the first schema violation, located in `text` when given."""
    errors = schema_errors(data, schema_name)
    if not errors:
        return
    error = errors[0]
    location = "/".join(str(p) for p in error.absolute_path) or "<root>"
    message = f"schema {schema_name}: {error.message} (at {location})"
    if text is None:
        raise InputError(message)
    line, column = locate_json_path(text, error.absolute_path)
    raise InputError(message, line, column)


def stable_key(*parts: Any) -> str:
    """Filesystem-safe, deterministic instance key."""
    raw = "-".join(str(p) for p in parts)
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", raw).strip("_")
