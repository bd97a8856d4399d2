"""
Corpus generation: q-Racah parameter grids turned into split-basis candidates,
verified, and written out as instance files plus a manifest of verdicts.
"""

import itertools
import json
import os
import random
from typing import Any, Dict, Iterator, List, Optional, Tuple

from engine import __version__
from engine.errors import (
    CandidateRejected,
    CapExceeded,
    Inconclusive,
    InvalidQRacahParameters,
    RepeatedEigenvalue,
    ZeroPhi,
)
from engine.exactfield import FieldDescriptor, field_from_literal, prime_field
from engine.exactlinalg import ExactMatrix, brute_force_invariant_subspaces, is_irreducible_pair
from engine.logger import ensure_dir, log, render_report
from engine.qracah import (
    DegenerateSpectrum,
    ParametricFamily,
    QRacahParameters,
    fit,
    generate_sequences,
    regenerates,
)
from engine.settings import get_setting
from engine.synthesis import construct_and_verify, construct_candidate, propose_phi
from engine.utils import stable_key, validate_against_schema

GRID_DIR = os.path.join(os.path.dirname(__file__), "..", "corpus")

GRID_AXES = ("d", "q", "a", "b", "c", "a_star", "b_star", "c_star", "phi1")
GRID_DEFAULTS = {"a": [0], "a_star": [0], "phi1": [1]}


def load_grid(name: str = None) -> Dict[str, Any]:
    """
    Load a corpus grid by name from the corpus/ directory.
    Default is the grid named in config.json.
    """
    name = name or get_setting("corpus_grid", "default_grid")
    filename = os.path.join(GRID_DIR, f"{name}.json")
    if not os.path.exists(filename):
        raise FileNotFoundError(f"Grid file not found: {filename}")

    with open(filename, "r", encoding="utf-8") as f:
        grid = json.load(f)
    validate_against_schema(grid, "grid")
    return grid


def grid_points(grid: Dict[str, Any]) -> Iterator[Tuple[str, Dict[str, Any]]]:
    """(field literal, axis values) for every point of the grid, in a fixed order."""
    fields = grid.get("fields", [get_setting("default_field", "rational")])
    axes = [grid.get(axis, GRID_DEFAULTS.get(axis, [])) for axis in GRID_AXES]
    for literal in fields:
        for values in itertools.product(*axes):
            yield literal, dict(zip(GRID_AXES, values))


def grid_size(grid: Dict[str, Any]) -> int:
    size = len(grid.get("fields", [get_setting("default_field", "rational")]))
    for axis in GRID_AXES:
        size *= len(grid.get(axis, GRID_DEFAULTS.get(axis, [])))
    return size


def instance_key(literal: str, point: Dict[str, Any]) -> str:
    return stable_key(literal.replace(":", ""), *(f"{axis}{point[axis]}" for axis in GRID_AXES))


def _qracah_fit_ok(theta, theta_star) -> bool:
    result = fit(theta, theta_star)
    if isinstance(result, ParametricFamily):
        result = result.sample()
        return isinstance(result, QRacahParameters) and regenerates(result, theta, theta_star)
    return isinstance(result, list) and all(regenerates(P, theta, theta_star) for P in result)


def build_instance(field: FieldDescriptor, point: Dict[str, Any], seed: Any) -> Tuple[Dict[str, Any], Optional[Dict[str, Any]]]:
    """
    Run one grid point through generate -> propose_phi -> construct_and_verify.
    Returns (manifest entry, instance file payload or None).
    """
    entry = {"valid": False, "sharp": None, "qracah_fit_ok": None, "rejected_condition": None}
    try:
        params = QRacahParameters(point["d"], *(field.element(point[k]) for k in GRID_AXES[1:8]))
    except InvalidQRacahParameters:
        entry["rejected_condition"] = "qracah_constraint"
        return entry, None
    sequences = generate_sequences(params)
    if isinstance(sequences, DegenerateSpectrum):
        entry["rejected_condition"] = "degenerate"
        return entry, None
    theta, theta_star = sequences.theta, sequences.theta_star
    entry["qracah_fit_ok"] = _qracah_fit_ok(theta, theta_star)

    phi = propose_phi(theta, theta_star, field.element(point["phi1"])) if point["d"] > 0 else ()
    try:
        candidate = construct_candidate(theta, theta_star, phi)
    except (ZeroPhi, RepeatedEigenvalue):
        entry["rejected_condition"] = "zero_phi"
        return entry, None
    payload = {
        "field": field.to_json(),
        "A": candidate.A.to_strings(),
        "Astar": candidate.Astar.to_strings(),
        "metadata": {"parameters": params.to_json(), "phi": [str(p) for p in phi]},
    }
    try:
        result = construct_and_verify(theta, theta_star, phi, seed)
    except CandidateRejected as e:
        entry["rejected_condition"] = e.condition
        return entry, payload
    except Inconclusive:
        entry["rejected_condition"] = "inconclusive"
        return entry, payload
    entry["valid"] = True
    entry["sharp"] = result.system.sharp
    payload["metadata"]["parameter_array"] = result.parameter_array.to_json()
    return entry, payload


def corpus_build(grid: Dict[str, Any], out_dir: Optional[str] = None, seed: Any = None,
                 max_instances: Optional[int] = None) -> Dict[str, Any]:
    """
    Build every grid instance. With `out_dir`, writes instances/<key>.json and
    manifest.json there. The manifest depends only on the grid and the seed.
    """
    seed = get_setting("seed", 0) if seed is None else seed
    cap = get_setting("max_instances", 500) if max_instances is None else max_instances
    size = grid_size(grid)
    if size > cap:
        raise CapExceeded(f"grid has {size} instances, cap is {cap}", {"instances": size, "cap": cap})

    entries: Dict[str, Dict[str, Any]] = {}
    files: Dict[str, Dict[str, Any]] = {}
    for literal, point in grid_points(grid):
        key = instance_key(literal, point)
        entry, payload = build_instance(field_from_literal(literal), point, seed)
        entries[key] = entry
        if payload is not None:
            files[key] = payload
    log(f"✅ Corpus built: {sum(e['valid'] for e in entries.values())}/{len(entries)} valid instances")

    manifest = {
        "version": __version__,
        "seed": seed,
        "count": len(entries),
        "instances": dict(sorted(entries.items())),
    }
    if out_dir:
        instance_dir = os.path.join(out_dir, "instances")
        ensure_dir(instance_dir)
        for key in sorted(files):
            with open(os.path.join(instance_dir, f"{key}.json"), "w", encoding="utf-8", newline="\n") as f:
                f.write(render_report(files[key]))
        with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8", newline="\n") as f:
            f.write(render_report(manifest))
        log(f"📁 Corpus written to {out_dir}")
    return manifest


def corpus_systems(grid: Dict[str, Any], seed: Any = None) -> Iterator[Tuple[str, Any]]:
    """(key, ConstructionResult) for every valid instance of a grid; used by the property suites."""
    seed = get_setting("seed", 0) if seed is None else seed
    for literal, point in grid_points(grid):
        field = field_from_literal(literal)
        try:
            params = QRacahParameters(point["d"], *(field.element(point[k]) for k in GRID_AXES[1:8]))
        except InvalidQRacahParameters:
            continue
        sequences = generate_sequences(params)
        if isinstance(sequences, DegenerateSpectrum):
            continue
        phi = propose_phi(sequences.theta, sequences.theta_star, field.element(point["phi1"])) if point["d"] > 0 else ()
        try:
            yield instance_key(literal, point), construct_and_verify(sequences.theta, sequences.theta_star, phi, seed)
        except (ZeroPhi, RepeatedEigenvalue, CandidateRejected, Inconclusive):
            continue


# --- irreducibility oracle sweep ---

def random_diagonalizable(field: FieldDescriptor, n: int, rng: random.Random) -> ExactMatrix:
    """P D P^-1 with D diagonal over the field."""
    D = ExactMatrix.diagonal(field, [field.random_element(rng) for _ in range(n)])
    P = ExactMatrix.random_invertible(field, n, rng)
    return P @ D @ P.inverse()


def irreducibility_oracle_sweep(count: int = 500, seed: Any = None, primes: Optional[List[int]] = None,
                                max_dim: Optional[int] = None) -> Dict[str, Any]:
    """
    Compare is_irreducible_pair with exhaustive enumeration on random
    diagonalizable pairs over tiny prime fields.
    """
    seed = get_setting("seed", 0) if seed is None else seed
    primes = primes or get_setting("brute_force_primes", [2, 3])
    max_dim = max_dim or get_setting("brute_force_max_dim", 4)
    rng = random.Random(seed)
    summary = {"count": count, "seed": seed, "agree": 0, "irreducible": 0, "independent_irreducible": 0,
               "methods": {}, "disagreements": []}
    for k in range(count):
        field = prime_field(primes[k % len(primes)])
        n = 2 + k % (max_dim - 1)
        A = random_diagonalizable(field, n, rng)
        Astar = random_diagonalizable(field, n, rng)
        verdict = is_irreducible_pair(A, Astar, seed=k)
        oracle = not any(S.is_proper() for S in brute_force_invariant_subspaces(A, Astar))
        summary["methods"][verdict.method] = summary["methods"].get(verdict.method, 0) + 1
        summary["irreducible"] += oracle
        # brute_force verdicts are the oracle itself
        if verdict.method != "brute_force":
            summary["independent_irreducible"] += oracle and verdict.irreducible
        if verdict.irreducible == oracle:
            summary["agree"] += 1
        else:
            summary["disagreements"].append({"index": k, "A": A.to_strings(), "Astar": Astar.to_strings()})
    summary["methods"] = dict(sorted(summary["methods"].items()))
    return summary
