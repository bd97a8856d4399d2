"""
CLI Command Types

One class per CLI command. Each command names the input schema it accepts,
turns the validated JSON into engine objects (parse), and runs the engine on
them (execute). Parsing problems are input errors; anything raised while
executing is a failed check.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from engine.corpus import corpus_build
from engine.exactfield import FieldDescriptor, field_from_json, field_from_literal
from engine.exactlinalg import ExactMatrix
from engine.paramarray import check_conjecture_conditions, extract_parameter_array
from engine.polynomial import MPolynomial, monomials_up_to_degree, parse_polynomial
from engine.qracah import (
    DegenerateSpectrum,
    NotQRacah,
    ParametricFamily,
    QRacahParameters,
    fit,
    generate_sequences,
)
from engine.settings import get_setting
from engine.synthesis import (
    construct_and_verify,
    mu_scalar_action,
    propose_phi,
    solve_phi_for_zeta,
    sweep_phi,
)
from engine.tdsystem import (
    build_system,
    standard_orderings,
    t_module_relations,
    triple_product_vanishing,
    verify_td_pair,
)

DEFAULT_MU_DEGREE = 3


@dataclass
class CommandOutcome:
    """What a command hands back to the report envelope"""
    passed: bool
    result: Dict[str, Any]
    field: Optional[FieldDescriptor] = None


class BaseCommand(ABC):
    """Base class for all CLI commands"""

    schema: str = ""

    def __init__(self, seed: int, field_literal: Optional[str] = None, out_path: Optional[str] = None,
                 max_instances: Optional[int] = None):
        self.seed = seed
        self.field_literal = field_literal
        self.out_path = out_path
        self.max_instances = max_instances

    def resolve_field(self, data: Dict[str, Any]) -> FieldDescriptor:
        """The input file's own field wins over --field, which wins over config."""
        if "field" in data:
            return field_from_json(data["field"])
        return field_from_literal(self.field_literal or get_setting("default_field", "rational"))

    @abstractmethod
    def parse(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """Turn schema-valid JSON into engine objects"""
        pass

    @abstractmethod
    def execute(self, parsed: Dict[str, Any]) -> CommandOutcome:
        """Run the engine on parsed input"""
        pass


def _parse_pair(data: Dict[str, Any], field: FieldDescriptor) -> Tuple[ExactMatrix, ExactMatrix]:
    return ExactMatrix.from_rows(field, data["A"]), ExactMatrix.from_rows(field, data["Astar"])


def _parse_sequences(data: Dict[str, Any], field: FieldDescriptor):
    return tuple(field.element(t) for t in data["theta"]), tuple(field.element(t) for t in data["theta_star"])


class CheckCommand(BaseCommand):
    """verify_td_pair, plus the system-level identities when all four conditions pass"""

    schema = "matrix_pair"

    def parse(self, data):
        field = self.resolve_field(data)
        A, Astar = _parse_pair(data, field)
        return {"field": field, "A": A, "Astar": Astar}

    def execute(self, parsed):
        report = verify_td_pair(parsed["A"], parsed["Astar"], seed=self.seed)
        result = report.to_dict()
        if report.passed:
            pairs = standard_orderings(parsed["A"], parsed["Astar"])
            system = build_system(parsed["A"], parsed["Astar"], verify=False)
            result["standard_orderings"] = len(pairs)
            result["system"] = system.to_dict()
            result["triple_product_vanishing"] = triple_product_vanishing(system).holds
            result["t_module_relations"] = t_module_relations(system)
        return CommandOutcome(report.passed, result, parsed["field"])


class ParamsCommand(CheckCommand):
    """Build the default system, extract its parameter array and check conditions (i)-(iii)"""

    def execute(self, parsed):
        system = build_system(parsed["A"], parsed["Astar"], seed=self.seed)
        array = extract_parameter_array(system)
        conditions = check_conjecture_conditions(array)
        result = {
            "system": system.to_dict(),
            "parameter_array": array.to_json(),
            "conditions": conditions.to_dict(),
        }
        return CommandOutcome(conditions.passed, result, parsed["field"])


class QRacahFitCommand(BaseCommand):
    schema = "sequences"

    def parse(self, data):
        field = self.resolve_field(data)
        theta, theta_star = _parse_sequences(data, field)
        return {"field": field, "theta": theta, "theta_star": theta_star}

    def execute(self, parsed):
        outcome = fit(parsed["theta"], parsed["theta_star"])
        if isinstance(outcome, NotQRacah):
            return CommandOutcome(False, outcome.to_dict(), parsed["field"])
        if isinstance(outcome, ParametricFamily):
            result = outcome.to_dict()
            witness = outcome.sample()
            result["witness"] = witness.to_json() if isinstance(witness, QRacahParameters) else witness.to_dict()
            return CommandOutcome(isinstance(witness, QRacahParameters), result, parsed["field"])
        return CommandOutcome(True, {"verdict": "QRacah", "fits": [P.to_json() for P in outcome]}, parsed["field"])


class GenerateCommand(BaseCommand):
    schema = "qracah_params"

    def parse(self, data):
        field = self.resolve_field(data)
        values = {k: data[k] for k in ("d", "q", "a", "b", "c", "a_star", "b_star", "c_star")}
        return {"field": field, "values": values}

    def execute(self, parsed):
        field, values = parsed["field"], parsed["values"]
        params = QRacahParameters(values["d"], *(field.element(values[k]) for k in
                                                 ("q", "a", "b", "c", "a_star", "b_star", "c_star")))
        sequences = generate_sequences(params)
        result = {"parameters": params.to_json(), "beta": str(params.beta)}
        if isinstance(sequences, DegenerateSpectrum):
            result.update(sequences.to_dict())
            return CommandOutcome(False, result, field)
        result.update(sequences.to_dict())
        result["verdict"] = "SequencePair"
        return CommandOutcome(True, result, field)


class ConstructCommand(BaseCommand):
    """
    Split-basis construction in one of four modes:
    explicit phi, phi_1 with propose_phi, a phi grid sweep, or a target zeta.
    """

    schema = "candidate"

    def parse(self, data):
        field = self.resolve_field(data)
        theta, theta_star = _parse_sequences(data, field)
        parsed = {"field": field, "theta": theta, "theta_star": theta_star}
        for mode in ("phi", "phi1", "phi_grid", "zeta"):
            if mode in data:
                parsed["mode"] = mode
                value = data[mode]
                parsed["value"] = field.element(value) if mode == "phi1" else tuple(field.element(v) for v in value)
        return parsed

    def execute(self, parsed):
        theta, theta_star, mode, value = parsed["theta"], parsed["theta_star"], parsed["mode"], parsed["value"]
        if mode == "phi_grid":
            stats = sweep_phi(theta, theta_star, value, seed=self.seed)
            result = {"mode": mode, "sweep": stats.to_dict()}
            return CommandOutcome(stats.accepted > 0 and stats.oracle_mismatches == 0, result, parsed["field"])
        if mode == "zeta":
            outcome = solve_phi_for_zeta(theta, theta_star, value, seed=self.seed)
        else:
            phi = propose_phi(theta, theta_star, value) if mode == "phi1" else value
            outcome = construct_and_verify(theta, theta_star, phi, seed=self.seed)
        result = outcome.to_dict()
        result["mode"] = mode
        return CommandOutcome(True, result, parsed["field"])


class MuTestCommand(BaseCommand):
    """mu_scalar_action for the given polynomials and every monomial up to max_degree"""

    schema = "mu_test"

    def parse(self, data):
        field = self.resolve_field(data)
        A, Astar = _parse_pair(data, field)
        n = A.rows
        # d is not known before the system is built; n bounds it, parse again once d is known
        texts = list(data.get("polynomials", []))
        for text in texts:
            parse_polynomial(text, field, max(n - 1, 1))
        return {"field": field, "A": A, "Astar": Astar, "polynomials": texts,
                "max_degree": data.get("max_degree", DEFAULT_MU_DEGREE)}

    def execute(self, parsed):
        field = parsed["field"]
        system = build_system(parsed["A"], parsed["Astar"], seed=self.seed)
        d = system.d
        polynomials: List[MPolynomial] = [parse_polynomial(text, field, d) for text in parsed["polynomials"]]
        if d >= 1:
            polynomials += monomials_up_to_degree(field, d, parsed["max_degree"])
        reports = [mu_scalar_action(system, f, strict=False) for f in polynomials]
        passed = all(r.passed for r in reports)
        result = {
            "system": system.to_dict(),
            "checked": len(reports),
            "failures": [r.to_dict() for r in reports if not r.passed],
        }
        if reports:
            first = reports[0].to_dict()
            result.update({k: first[k] for k in ("xi", "g_value", "h_value")})
            result["commuting"] = reports[0].commutativity_verified
        return CommandOutcome(passed, result, field)


class CorpusCommand(BaseCommand):
    schema = "grid"

    def parse(self, data):
        return {"grid": data}

    def execute(self, parsed):
        manifest = corpus_build(parsed["grid"], self.out_path, seed=self.seed, max_instances=self.max_instances)
        result = {
            "count": manifest["count"],
            "valid": sum(1 for e in manifest["instances"].values() if e["valid"]),
            "manifest": manifest["instances"],
        }
        return CommandOutcome(True, result)


class CommandFactory:
    """Factory for creating command instances"""

    _commands = {
        "check": CheckCommand,
        "params": ParamsCommand,
        "qracah-fit": QRacahFitCommand,
        "generate": GenerateCommand,
        "construct": ConstructCommand,
        "mu-test": MuTestCommand,
        "corpus": CorpusCommand,
    }

    @classmethod
    def create_command(cls, command: str, **kwargs) -> BaseCommand:
        """Create an instance of the specified command"""
        if command not in cls._commands:
            raise ValueError(f"Unknown command: {command}")
        return cls._commands[command](**kwargs)

    @classmethod
    def get_available_commands(cls) -> List[str]:
        return list(cls._commands)
