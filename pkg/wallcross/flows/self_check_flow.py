"""
Randomised invariant suites over the whole engine.

Every family gets the same seeded generator so a run is reproducible from its
seed alone; the bundled wall families are always included.
"""
import random
import sys
from dataclasses import dataclass, field
from typing import Callable, TextIO

from wallcross.constants import (
    EXIT_INTERNAL,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    BUNDLED_FAMILIES,
    RANDOM_MAX_ABS_WEIGHT,
    RANDOM_MAX_COORDINATES,
    RANDOM_MAX_DISK_DIM,
    RANDOM_MAX_MONODROMY_DIM,
    RANDOM_WINDOW_BASE_RANGE,
    SIDE_MINUS,
    SIDE_PLUS,
)
from wallcross.errors import WallcrossError
from wallcross.logging import logger
from wallcross.services.exact_algebra import (
    Laurent,
    LinearMap,
    invert,
    is_invertible,
    kernel_basis,
    rank,
    window_reduce,
)
from wallcross.services.kgit import (
    WallModel,
    WallReport,
    build_model,
    full_report,
    koszul_class,
)
from wallcross.services.perverse_disk import (
    GGMDiagram,
    defect_report,
    direct_sum,
    ggm_to_ks,
    ic_from_monodromy,
    ks_to_ggm,
    monodromies,
    skyscraper,
    validate_ggm,
    validate_ks,
)
from wallcross.utils import format_weights


@dataclass
class FamilyResult:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)

    def expect(self, condition: bool, detail: str) -> None:
        self.checks += 1
        if not condition:
            self.failures.append(detail)


###############################################################################
# Generators
###############################################################################
def _split(rng: random.Random, total: int, parts: int, cap: int) -> list[int]:
    """Random composition of total into parts, each in [1, cap]"""
    values = [1] * parts
    for _ in range(total - parts):
        open_slots = [i for i, v in enumerate(values) if v < cap]
        values[rng.choice(open_slots)] += 1
    return values


def random_weights(rng: random.Random) -> tuple[int, ...]:
    """Balanced weight vector with at most RANDOM_MAX_COORDINATES entries of size at most RANDOM_MAX_ABS_WEIGHT"""
    cap = RANDOM_MAX_ABS_WEIGHT
    length = rng.randint(2, RANDOM_MAX_COORDINATES)
    nonzero = length - rng.randint(0, length - 2)
    feasible = [p for p in range(1, nonzero) if max(p, nonzero - p) <= cap * min(p, nonzero - p)]
    positives = rng.choice(feasible)
    negatives = nonzero - positives
    eta = rng.randint(max(positives, negatives), cap * min(positives, negatives))
    weights = _split(rng, eta, positives, cap) + [-a for a in _split(rng, eta, negatives, cap)]
    weights += [0] * (length - nonzero)
    rng.shuffle(weights)
    return tuple(weights)


def random_model(rng: random.Random) -> WallModel:
    return build_model(random_weights(rng), rng.randint(*RANDOM_WINDOW_BASE_RANGE))


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = 2) -> LinearMap:
    return LinearMap([[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)], cols, rows)


def random_invertible(rng: random.Random, size: int) -> LinearMap:
    while True:
        m = random_matrix(rng, size, size)
        if is_invertible(m):
            return m


def random_ggm(rng: random.Random) -> GGMDiagram:
    """Random diagram with vu + 1 invertible"""
    while True:
        d0 = rng.randint(0, RANDOM_MAX_DISK_DIM)
        d1 = rng.randint(0, RANDOM_MAX_DISK_DIM)
        G = GGMDiagram.from_maps(random_matrix(rng, d0, d1, 1), random_matrix(rng, d1, d0, 1))
        if validate_ggm(G):
            return G


def random_laurent(rng: random.Random, lo: int, hi: int) -> Laurent:
    return Laurent({k: rng.randint(-3, 3) for k in range(lo, hi + 1)})


###############################################################################
# Families
###############################################################################
def check_window_reduce(rng: random.Random, models: list[WallModel]) -> FamilyResult:
    result = FamilyResult('exact_algebra.window_reduce')
    for model in models:
        for q in (model.q_minus, model.q_plus):
            width = q.span
            lo = rng.randint(-6, 6)
            p1 = random_laurent(rng, lo - 2 * width, lo + 2 * width)
            p2 = random_laurent(rng, lo - width, lo + 3 * width)
            r1 = window_reduce(p1, q, lo, width)
            tag = f"{format_weights(model.weights)} q={q} lo={lo}"
            result.expect(all(lo <= k < lo + width for k in r1.support), f"{tag}: support {r1.support} outside window")
            result.expect(window_reduce(r1, q, lo, width) == r1, f"{tag}: not idempotent")
            combined = window_reduce(p1 + p2.scale(2), q, lo, width)
            result.expect(combined == r1 + window_reduce(p2, q, lo, width).scale(2), f"{tag}: not linear")
            other = window_reduce(p1, q, lo + 1, width)
            result.expect(window_reduce(other, q, lo, width) == r1, f"{tag}: class depends on the window")
    return result


def check_matrices(rng: random.Random, trials: int) -> FamilyResult:
    result = FamilyResult('exact_algebra.matrices')
    for _ in range(trials):
        size = rng.randint(0, RANDOM_MAX_MONODROMY_DIM)
        m = random_matrix(rng, size, rng.randint(0, RANDOM_MAX_MONODROMY_DIM))
        kernel = kernel_basis(m)
        result.expect(rank(m) + len(kernel) == m.cols, f"{m!r}: rank + nullity != cols")
        for vector in kernel:
            image = m @ LinearMap.from_columns([vector], 1, m.cols)
            result.expect(image.is_zero(), f"{m!r}: kernel vector {vector} not killed")
        square = random_matrix(rng, size, size)
        invertible = is_invertible(square)
        result.expect(invertible == (rank(square) == size) == (not kernel_basis(square)),
                      f"{square!r}: invertibility tests disagree")
        if invertible:
            result.expect((invert(square) @ square).is_identity(), f"{square!r}: inverse is wrong")
    return result


def check_ggm(rng: random.Random, trials: int) -> FamilyResult:
    result = FamilyResult('perverse_disk.ggm')
    for _ in range(trials):
        G = random_ggm(rng)
        H = random_ggm(rng)
        tag = f"G(d0={G.d0}, d1={G.d1}, u={G.u.to_rows()}, v={G.v.to_rows()})"
        K = ggm_to_ks(G)
        result.expect(validate_ks(K), f"{tag}: ggm_to_ks is not valid")
        back, certificate = ks_to_ggm(K)
        result.expect(back.u == G.u and back.v == G.v, f"{tag}: round trip changed the matrices")
        result.expect(certificate.verify(K, ggm_to_ks(back)), f"{tag}: certificate does not intertwine")
        m_minus, m_plus = monodromies(K)
        intertwiner = K.g_minus @ K.f_plus
        result.expect(intertwiner @ m_plus == m_minus @ intertwiner, f"{tag}: monodromies not conjugate")
        report = defect_report(G)
        result.expect(report.skyscraper_count >= 0, f"{tag}: negative defect")
        total = defect_report(direct_sum(G, H))
        other = defect_report(H)
        result.expect(
            (total.vanishing_dim, total.nearby_rank_drop, total.skyscraper_count)
            == (report.vanishing_dim + other.vanishing_dim,
                report.nearby_rank_drop + other.nearby_rank_drop,
                report.skyscraper_count + other.skyscraper_count),
            f"{tag}: defect not additive",
        )
    return result


def check_ic(rng: random.Random, trials: int) -> FamilyResult:
    result = FamilyResult('perverse_disk.ic')
    result.expect(defect_report(skyscraper()).skyscraper_count == 1, "skyscraper defect != 1")
    for _ in range(trials):
        m = random_invertible(rng, rng.randint(1, RANDOM_MAX_MONODROMY_DIM))
        G = ic_from_monodromy(m)
        report = defect_report(G)
        result.expect(report.is_ic and report.skyscraper_count == 0, f"{m!r}: IC extension has a skyscraper")
        result.expect(G.m == m, f"{m!r}: IC extension changed the monodromy")
    return result


def evaluate_reports(models: list[WallModel]) -> list[WallReport | WallcrossError]:
    """One report per model, shared by the kgit families; errors are kept in place"""
    reports: list[WallReport | WallcrossError] = []
    for model in models:
        try:
            reports.append(full_report(model))
        except WallcrossError as e:
            reports.append(e)
    return reports


def check_kgit(models: list[WallModel], reports: list[WallReport | WallcrossError]) -> FamilyResult:
    result = FamilyResult('kgit.report')
    for model, report in zip(models, reports):
        tag = format_weights(model.weights)
        if isinstance(report, WallcrossError):
            result.expect(False, f"{tag}: {report}")
            continue
        result.expect(not report.parity.prediction or report.ic_primary.saturated, f"{tag}: parity without saturation")
        result.expect(report.defect in (0, 1), f"{tag}: defect {report.defect}")
        back, _ = ks_to_ggm(ggm_to_ks(report.kp_ggm))
        result.expect(back == report.kp_ggm, f"{tag}: GGM round trip of ^K P changed the matrices")
    return result


def check_symmetry(rng: random.Random, models: list[WallModel],
                   reports: list[WallReport | WallcrossError]) -> FamilyResult:
    result = FamilyResult('kgit.symmetry')
    for model, report in zip(models, reports):
        tag = format_weights(model.weights)
        shuffled = list(model.weights)
        rng.shuffle(shuffled)
        shift = rng.randint(1, 3)
        if isinstance(report, WallcrossError):
            result.expect(False, f"{tag}: {report}")
            continue
        try:
            permuted = full_report(build_model(shuffled, model.window_base))
            moved = full_report(build_model(model.weights, model.window_base + shift))
        except WallcrossError as e:
            result.expect(False, f"{tag}: {e}")
            continue
        result.expect(permuted.matrices() == report.matrices(), f"{tag}: depends on weight order")
        result.expect(moved.matrices() == report.matrices(), f"{tag}: depends on the window base")
        result.expect(
            (moved.ic_primary, moved.ic_dual, moved.defect) == (report.ic_primary, report.ic_dual, report.defect),
            f"{tag}: verdicts depend on the window base",
        )
    return result


def check_families() -> FamilyResult:
    result = FamilyResult('kgit.families')
    for name, weights, base in BUNDLED_FAMILIES:
        try:
            model = build_model(weights, base)
            report = full_report(model)
        except WallcrossError as e:
            result.expect(False, f"{name}: {e}")
            continue
        if name == 'conifold' or name.startswith('standard_flop'):
            result.expect(report.spherical.k_s.is_zero(), f"{name}: K(S) != 0")
            result.expect(not report.ic_primary.saturated and report.defect == 1, f"{name}: saturated")
            d = model.positive_count
            flipped = koszul_class(model, SIDE_PLUS, 0).shift(d).scale((-1) ** d)
            result.expect(koszul_class(model, SIDE_MINUS, 0) == flipped, f"{name}: Koszul classes differ")
        else:
            result.expect(report.parity.prediction, f"{name}: parity gives no prediction")
            result.expect(report.ic_primary.saturated and report.defect == 0, f"{name}: not saturated")
    return result


###############################################################################
# Entry point
###############################################################################
def run_self_check(trials: int, seed: int, out: TextIO | None = None) -> int:
    """Run all families; exit 0 only when every check passes"""
    out = out or sys.stdout
    if trials < 1:
        print(f"InvalidInput: trials must be at least 1, got {trials}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    logger.info(f"[SELF_CHECK] trials={trials}, seed={seed}")
    rng = random.Random(seed)
    models = [build_model(weights, base) for _, weights, base in BUNDLED_FAMILIES]
    models += [random_model(rng) for _ in range(trials)]
    reports = evaluate_reports(models)

    suites: list[Callable[[], FamilyResult]] = [
        lambda: check_window_reduce(rng, models),
        lambda: check_matrices(rng, trials),
        lambda: check_ggm(rng, trials),
        lambda: check_ic(rng, max(trials // 4, 50)),
        lambda: check_kgit(models, reports),
        lambda: check_symmetry(rng, models, reports),
        check_families,
    ]
    failed = False
    for suite in suites:
        result = suite()
        if result.failures:
            failed = True
            logger.error(f"[SELF_CHECK] {result.name}: {len(result.failures)} failures")
            print(f"FAIL {result.name} ({len(result.failures)} of {result.checks} checks)", file=out)
            for failure in result.failures:
                print(f"  {failure}", file=out)
        else:
            print(f"PASS {result.name} ({result.checks} checks)", file=out)
    return EXIT_INTERNAL if failed else EXIT_OK
