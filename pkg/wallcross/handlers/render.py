import json
from typing import TYPE_CHECKING, Sequence

from wallcross.constants import FORMAT_JSON, OUTPUT_FORMATS
from wallcross.errors import InvalidInput
from wallcross.services.exact_algebra import LinearMap, format_rational
from wallcross.services.kgit import CriterionResult, WallReport
from wallcross.utils import format_weights

if TYPE_CHECKING:
    from wallcross.flows.case_flow import CaseOutput


def _row(values) -> str:
    return '[' + ', '.join(str(v) for v in values) + ']'


def _basis(labels: Sequence[str]) -> str:
    return '{' + ', '.join(labels) + '}'


def format_map(name: str, arrow: LinearMap) -> list[str]:
    """Header with bases, then one row per codomain label"""
    lines = [f"{name}: {_basis(arrow.domain_basis)} -> {_basis(arrow.codomain_basis)}"]
    if arrow.rows == 0 or arrow.cols == 0:
        lines.append("  (empty)")
        return lines
    width = max(len(label) for label in arrow.codomain_basis)
    for label, row in zip(arrow.codomain_basis, arrow.to_rows()):
        lines.append(f"  {label.rjust(width)} | {_row(row)}")
    return lines


def format_criterion(label: str, result: CriterionResult) -> str:
    if result.saturated:
        return f"{label}: saturated ({result.rank} = {result.bound})"
    return f"{label}: not saturated ({result.rank} < {result.bound})"


def format_parity(report: WallReport) -> str:
    parity = report.parity
    codim = report.model.codim_z
    parity_word = 'odd' if parity.codim_odd else 'even'
    if parity.prediction:
        return f"parity: codim {codim} {parity_word}, det trivial, predicts saturated"
    return f"parity: codim {codim} {parity_word}, no prediction"


def format_defect(report: WallReport) -> str:
    return f"defect: {report.defect} (^K P), {report.dual_defect} (P^K)"


def verdict_lines(report: WallReport) -> list[str]:
    return [
        format_criterion('IC', report.ic_primary),
        format_criterion('dual IC', report.ic_dual),
        format_parity(report),
        format_defect(report),
    ]


def render_report_text(report: WallReport) -> list[str]:
    model = report.model
    lines = [
        f"eta = {model.eta}, codim Z = {model.codim_z}",
        f"q- = {model.q_minus}",
        f"q+ = {model.q_plus}",
    ]
    for name, arrow in report.matrices().items():
        lines.extend(format_map(name, arrow))
    lines.extend(format_map('m_plus', report.m_plus))
    lines.append(f"m_prime = {format_rational(report.m_prime)}")
    lines.append(f"charpoly(m_plus) = {_row(format_rational(c) for c in report.monodromy_charpoly)}")
    lines.append(f"^K P as GGM: d0 = {report.kp_ggm.d0}, d1 = {report.kp_ggm.d1}")
    lines.append(f"spherical pair composites invertible: {'yes' if report.compositions.all_equivalences else 'no'}")
    lines.extend(verdict_lines(report))
    return lines


def render_output_text(output: 'CaseOutput') -> list[str]:
    weights = output.weights
    shown = format_weights(weights) if isinstance(weights, (list, tuple)) else repr(weights)
    header = f"== {output.name}: weights {shown}"
    if output.window_base is not None:
        header += f", k0 = {output.window_base}"
    lines = [header + " =="]
    if output.rejected:
        lines.append(f"rejected: {output.error}")
        return lines
    return lines + render_report_text(output.report)


def output_to_dict(output: 'CaseOutput') -> dict:
    if output.rejected:
        return {
            'name': output.name,
            'weights': output.weights,
            'window_base': output.window_base,
            'error': {'code': output.error.code, 'message': output.error.message},
        }
    return output.report.to_dict()


def render_outputs(outputs: Sequence['CaseOutput'], output_format: str) -> str:
    if output_format not in OUTPUT_FORMATS:
        raise InvalidInput(f"format must be one of {OUTPUT_FORMATS}, got {output_format!r}")
    if output_format == FORMAT_JSON:
        payload = {'cases': [output_to_dict(output) for output in outputs]}
        return json.dumps(payload, indent=2, ensure_ascii=False) + '\n'
    blocks = ['\n'.join(render_output_text(output)) for output in outputs]
    return '\n\n'.join(blocks) + '\n'
