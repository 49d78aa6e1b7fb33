import json
from pathlib import Path
from typing import TextIO

from wallcross import config
from wallcross.errors import ScenarioError
from wallcross.flows.case_flow import CaseSpec, emit, evaluate_case, exit_code_for
from wallcross.logging import logger
from wallcross.utils import map_in_order

SCENARIO_FIELDS = {'name', 'weights', 'window_base'}


def parse_scenario(payload) -> list[CaseSpec]:
    """Check the file layout; per-case values are checked later, case by case"""
    if not isinstance(payload, list):
        raise ScenarioError(f"scenario must be a JSON list of cases, got {type(payload).__name__}")
    cases = []
    seen = set()
    for index, entry in enumerate(payload):
        if not isinstance(entry, dict):
            raise ScenarioError(f"case #{index} is not an object")
        unknown = set(entry) - SCENARIO_FIELDS
        if unknown:
            raise ScenarioError(f"case #{index} has unknown fields {sorted(unknown)}")
        name = entry.get('name')
        if not isinstance(name, str) or not name.strip():
            raise ScenarioError(f"case #{index} has no name")
        if name in seen:
            raise ScenarioError(f"duplicate case name {name!r}")
        if 'weights' not in entry:
            raise ScenarioError(f"case {name!r} has no weights")
        seen.add(name)
        cases.append(CaseSpec(name=name, weights=entry['weights'], window_base=entry.get('window_base')))
    return cases


def load_scenario(path: str | Path) -> list[CaseSpec]:
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e.strerror or e}") from e
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(f"{path} is not valid JSON: {e.msg} at line {e.lineno}") from e
    return parse_scenario(payload)


def run_scenario(path: str | Path, output_format: str, workers: int | None = None,
                 out: TextIO | None = None) -> int:
    """Evaluate every case of a scenario file and emit them in file order"""
    cases = load_scenario(path)
    if workers is None:
        workers = config.WORKERS if config.is_parallel_enabled() else 1
    logger.info(f"[SCENARIO] {path}: {len(cases)} cases, {workers} workers, format={output_format}")
    outputs = map_in_order(evaluate_case, cases, workers)
    emit(outputs, output_format, out)
    code = exit_code_for(outputs)
    logger.info(f"[SCENARIO] {path}: done, exit code {code}")
    return code
