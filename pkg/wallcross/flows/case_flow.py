import sys
from dataclasses import dataclass
from typing import Any, Iterable, TextIO

from wallcross import config
from wallcross.constants import EXIT_INTERNAL, EXIT_INVALID_INPUT, EXIT_OK
from wallcross.errors import InputError, InternalError, InvalidInput, WallcrossError
from wallcross.handlers.render import render_outputs
from wallcross.logging import logger
from wallcross.services.kgit import WallReport, build_model, full_report
from wallcross.utils import describe_error, parse_weights, validate_window_base


@dataclass(frozen=True)
class CaseSpec:
    """One requested case, fields as they arrived from flags or a scenario file"""

    name: str
    weights: Any
    window_base: Any = None


@dataclass(frozen=True)
class CaseOutput:
    name: str
    weights: Any
    window_base: Any
    report: WallReport | None = None
    error: WallcrossError | None = None

    @property
    def rejected(self) -> bool:
        return self.error is not None


def _coerce_weights(raw) -> tuple[int, ...]:
    if isinstance(raw, str):
        return parse_weights(raw)
    if not isinstance(raw, (list, tuple)):
        raise InvalidInput(f"weights must be a list of integers, got {raw!r}")
    for value in raw:
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidInput(f"weight {value!r} is not an integer")
    return tuple(raw)


def _coerce_window_base(raw) -> int:
    if raw is None:
        return config.DEFAULT_WINDOW_BASE
    is_valid, message, value = validate_window_base(raw)
    if not is_valid:
        raise InvalidInput(message)
    return value


def evaluate_case(case: CaseSpec) -> CaseOutput:
    """Build and report one case; library errors become a rejection, nothing else is caught"""
    try:
        weights = _coerce_weights(case.weights)
        window_base = _coerce_window_base(case.window_base)
        report = full_report(build_model(weights, window_base), name=case.name)
        logger.info(f"[CASE] {case.name}: saturated={report.ic_primary.saturated}, defect={report.defect}")
        return CaseOutput(name=case.name, weights=list(weights), window_base=window_base, report=report)
    except InputError as e:
        logger.info(f"[CASE] {case.name} rejected: {e}")
        return CaseOutput(name=case.name, weights=case.weights, window_base=case.window_base, error=e)
    except InternalError as e:
        logger.error(f"[CASE] {case.name} failed internal checks: {e}", exc_info=True)
        return CaseOutput(name=case.name, weights=case.weights, window_base=case.window_base, error=e)


def exit_code_for(outputs: Iterable[CaseOutput]) -> int:
    code = EXIT_OK
    for output in outputs:
        if isinstance(output.error, InternalError):
            return EXIT_INTERNAL
        if output.error is not None:
            code = EXIT_INVALID_INPUT
    return code


def emit(outputs: list[CaseOutput], output_format: str, out: TextIO | None = None) -> None:
    out = out or sys.stdout
    out.write(render_outputs(outputs, output_format))
    for output in outputs:
        if output.rejected:
            print(f"{output.name}: {describe_error(output.error)}", file=sys.stderr)


def run_case(weights: str, window_base: str | int | None, output_format: str,
             out: TextIO | None = None) -> int:
    """Single-case equivalent of run_scenario"""
    label = 'case'
    logger.info(f"[CASE] Running weights {weights}, k0={window_base}, format={output_format}")
    output = evaluate_case(CaseSpec(name=label, weights=weights, window_base=window_base))
    emit([output], output_format, out)
    return exit_code_for([output])
