"""
Grothendieck-group shadow of a simple balanced wall crossing for C* acting on C^n.

Classes live in Z[t, t^-1], t the weight-one character. The window category
has exponents [k0, k0 + eta], the two quotients are read on its lower and upper
eta exponents, and the fixed locus contributes one class.
"""
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Sequence

from wallcross import config
from wallcross.constants import SIDE_MINUS, SIDE_PLUS, SIDES
from wallcross.errors import InternalInvariantViolation, InvalidInput, NotCalabiYau, NoWall
from wallcross.logging import logger
from wallcross.services.exact_algebra import (
    Laurent,
    LinearMap,
    characteristic_polynomial,
    format_rational,
    is_invertible,
    rank,
    window_reduce,
)
from wallcross.services.perverse_disk import (
    GGMDiagram,
    KSDiagram,
    defect_report,
    ks_to_ggm,
    monodromies,
    validate_ks,
)
from wallcross.utils import exponent_label, map_in_order

# Label of the single class of the fixed locus
FIXED_LOCUS_LABEL = '1'


###############################################################################
# Model
###############################################################################
@dataclass(frozen=True)
class WallModel:
    weights: tuple[int, ...]
    window_base: int
    eta: int
    codim_z: int
    positive_count: int
    negative_count: int
    q_minus: Laurent
    q_plus: Laurent


def _koszul_product(weights: Iterable[int]) -> Laurent:
    product = Laurent.one()
    for a in weights:
        product = product * (Laurent.one() - Laurent.monomial(a))
    return product


def build_model(weights: Sequence[int], window_base: int | None = None) -> WallModel:
    """Validate wall data and derive eta, codim Z and the Koszul classes."""
    if window_base is None:
        window_base = config.DEFAULT_WINDOW_BASE
    for value in (*weights, window_base):
        if isinstance(value, bool) or not isinstance(value, int):
            raise InvalidInput(f"{value!r} is not an integer")
    weights = tuple(weights)
    positive = [a for a in weights if a > 0]
    negative = [a for a in weights if a < 0]
    if not positive or not negative:
        raise NoWall(f"weights {list(weights)} have no sign change, nothing flips")
    if sum(weights) != 0:
        raise NotCalabiYau(f"weights {list(weights)} sum to {sum(weights)}, expected 0")
    model = WallModel(
        weights=weights,
        window_base=window_base,
        eta=sum(positive),
        codim_z=len(positive) + len(negative),
        positive_count=len(positive),
        negative_count=len(negative),
        q_minus=_koszul_product(positive),
        q_plus=_koszul_product(negative),
    )
    logger.debug(f"[KGIT] Model {list(weights)} k0={window_base}: eta={model.eta}, codim={model.codim_z}")
    return model


@dataclass(frozen=True)
class WindowBases:
    c_basis: tuple[int, ...]
    g_minus_basis: tuple[int, ...]
    g_plus_basis: tuple[int, ...]

    @staticmethod
    def labels(exponents: Sequence[int]) -> tuple[str, ...]:
        return tuple(exponent_label(k) for k in exponents)

    def to_dict(self) -> dict:
        return {
            'c': list(self.c_basis),
            'g_minus': list(self.g_minus_basis),
            'g_plus': list(self.g_plus_basis),
        }


def window_bases(model: WallModel) -> WindowBases:
    k0, eta = model.window_base, model.eta
    return WindowBases(
        c_basis=tuple(range(k0, k0 + eta + 1)),
        g_minus_basis=tuple(range(k0, k0 + eta)),
        g_plus_basis=tuple(range(k0 + 1, k0 + eta + 1)),
    )


def koszul_class(model: WallModel, side: str, twist: int) -> Laurent:
    """Class of the structure sheaf of the blade on the given side, twisted by t^twist."""
    if side not in SIDES:
        raise InvalidInput(f"side must be one of {SIDES}, got {side!r}")
    q = model.q_minus if side == SIDE_MINUS else model.q_plus
    return q.shift(twist)


###############################################################################
# Maps between window, quotients and fixed locus
###############################################################################
def _reduction(q: Laurent, source: Sequence[int], target: Sequence[int]) -> LinearMap:
    """Matrix of t^k -> (t^k mod q) from monomials in source to the target window."""
    columns = [
        window_reduce(Laurent.monomial(k), q, target[0], len(target)).to_vector(target)
        for k in source
    ]
    return LinearMap.from_columns(columns, WindowBases.labels(source), WindowBases.labels(target))


def _inclusion(source: Sequence[int], target: Sequence[int]) -> LinearMap:
    rows = [[int(s == t) for s in source] for t in target]
    return LinearMap(rows, WindowBases.labels(source), WindowBases.labels(target))


@dataclass(frozen=True)
class StructureMaps:
    res_minus: LinearMap
    res_plus: LinearMap
    res_minus_star: LinearMap
    res_plus_star: LinearMap
    star_res_minus: LinearMap
    star_res_plus: LinearMap


@lru_cache(maxsize=512)
def structure_maps(model: WallModel) -> StructureMaps:
    bases = window_bases(model)
    c, g_minus, g_plus = bases.c_basis, bases.g_minus_basis, bases.g_plus_basis
    # left adjoints land in the window shifted by one: upper eta for -, lower eta for +
    return StructureMaps(
        res_minus=_reduction(model.q_minus, c, g_minus),
        res_plus=_reduction(model.q_plus, c, g_plus),
        res_minus_star=_inclusion(g_minus, c),
        res_plus_star=_inclusion(g_plus, c),
        star_res_minus=_inclusion(g_plus, c) @ _reduction(model.q_minus, g_minus, g_plus),
        star_res_plus=_inclusion(g_minus, c) @ _reduction(model.q_plus, g_plus, g_minus),
    )


@dataclass(frozen=True)
class IotaMaps:
    iota_minus: LinearMap
    iota_plus: LinearMap
    star_iota_minus: LinearMap
    iota_minus_star: LinearMap
    star_iota_plus: LinearMap
    iota_plus_star: LinearMap


def _coefficient_row(c_basis: Sequence[int], exponent: int, sign: int) -> LinearMap:
    row = [sign if k == exponent else 0 for k in c_basis]
    return LinearMap([row], WindowBases.labels(c_basis), (FIXED_LOCUS_LABEL,))


@lru_cache(maxsize=512)
def iota_maps(model: WallModel) -> IotaMaps:
    """
    Embeddings of the fixed-locus class and their adjoints.

    The right adjoints carry (-1)^(number of weights on that side) for the shift
    by the codimension of the stratum.
    """
    c = window_bases(model).c_basis
    k0, eta = model.window_base, model.eta
    labels = WindowBases.labels(c)
    iota_minus = LinearMap.from_columns(
        [koszul_class(model, SIDE_MINUS, k0).to_vector(c)], (FIXED_LOCUS_LABEL,), labels
    )
    iota_plus = LinearMap.from_columns(
        [koszul_class(model, SIDE_PLUS, k0 + eta).to_vector(c)], (FIXED_LOCUS_LABEL,), labels
    )
    return IotaMaps(
        iota_minus=iota_minus,
        iota_plus=iota_plus,
        star_iota_minus=_coefficient_row(c, k0, 1),
        iota_minus_star=_coefficient_row(c, k0 + eta, (-1) ** model.positive_count),
        star_iota_plus=_coefficient_row(c, k0 + eta, 1),
        iota_plus_star=_coefficient_row(c, k0, (-1) ** model.negative_count),
    )


@dataclass(frozen=True)
class SphericalData:
    k_s: LinearMap
    k_s_star: LinearMap
    m_plus: LinearMap
    m_prime: Fraction


@lru_cache(maxsize=512)
def spherical_data(model: WallModel) -> SphericalData:
    """K-images of S = res+ iota- and its right adjoint, with twist and cotwist."""
    res = structure_maps(model)
    iota = iota_maps(model)
    k_s = res.res_plus @ iota.iota_minus
    k_s_star = iota.iota_minus_star @ res.res_plus_star
    m_plus = LinearMap.identity(k_s.codomain_basis) - k_s @ k_s_star
    m_prime = 1 - (k_s_star @ k_s).as_scalar()
    return SphericalData(k_s=k_s, k_s_star=k_s_star, m_plus=m_plus, m_prime=m_prime)


@dataclass(frozen=True)
class PairCompositions:
    iota_plus_star_iota_minus: LinearMap
    iota_minus_star_iota_plus: LinearMap
    res_plus_res_minus_star: LinearMap
    res_minus_res_plus_star: LinearMap

    @property
    def all_equivalences(self) -> bool:
        return all(is_invertible(c) for c in (
            self.iota_plus_star_iota_minus,
            self.iota_minus_star_iota_plus,
            self.res_plus_res_minus_star,
            self.res_minus_res_plus_star,
        ))

    def to_dict(self) -> dict:
        return {
            'iota_plus_star_iota_minus': self.iota_plus_star_iota_minus.to_rows(),
            'iota_minus_star_iota_plus': self.iota_minus_star_iota_plus.to_rows(),
            'res_plus_res_minus_star': self.res_plus_res_minus_star.to_rows(),
            'res_minus_res_plus_star': self.res_minus_res_plus_star.to_rows(),
            'all_equivalences': self.all_equivalences,
        }


def pair_compositions(model: WallModel) -> PairCompositions:
    """The four composites whose invertibility makes the pair spherical."""
    res = structure_maps(model)
    iota = iota_maps(model)
    return PairCompositions(
        iota_plus_star_iota_minus=iota.iota_plus_star @ iota.iota_minus,
        iota_minus_star_iota_plus=iota.iota_minus_star @ iota.iota_plus,
        res_plus_res_minus_star=res.res_plus @ res.res_minus_star,
        res_minus_res_plus_star=res.res_minus @ res.res_plus_star,
    )


def assemble_kp(model: WallModel) -> KSDiagram:
    """KS diagram on K(C) with the two quotients as half-line stalks."""
    res = structure_maps(model)
    return KSDiagram.from_maps(
        f_minus=res.res_minus_star,
        f_plus=res.res_plus_star,
        g_minus=res.res_minus,
        g_plus=res.res_plus,
    )


def assemble_pk(model: WallModel) -> KSDiagram:
    """KS diagram on K(C) with the fixed-locus class on both half-lines."""
    iota = iota_maps(model)
    return KSDiagram.from_maps(
        f_minus=iota.iota_minus,
        f_plus=iota.iota_plus,
        g_minus=iota.iota_minus_star,
        g_plus=iota.iota_plus_star,
    )


###############################################################################
# Criteria
###############################################################################
@dataclass(frozen=True)
class CriterionResult:
    rank: int
    bound: int
    saturated: bool

    def to_dict(self) -> dict:
        return {'rank': self.rank, 'bound': self.bound, 'saturated': self.saturated}


@dataclass(frozen=True)
class ParityCheck:
    lemma_conditions: bool
    codim_odd: bool
    prediction: bool

    def to_dict(self) -> dict:
        return {
            'lemma_conditions': self.lemma_conditions,
            'codim_odd': self.codim_odd,
            'prediction': self.prediction,
        }


def ic_criterion(model: WallModel) -> CriterionResult:
    """rk(m - 1) against dim K(D) = 1 for the monodromy on K(X//+)."""
    m_plus = spherical_data(model).m_plus
    drop = rank(m_plus - LinearMap.identity(m_plus.domain_basis))
    return CriterionResult(rank=drop, bound=1, saturated=drop == 1)


def dual_ic_criterion(model: WallModel) -> CriterionResult:
    """rk(m' - 1) against dim K(X//+) = eta for the scalar monodromy on K(D)."""
    drop = 0 if spherical_data(model).m_prime == 1 else 1
    return CriterionResult(rank=drop, bound=model.eta, saturated=drop == model.eta)


def parity_check(model: WallModel) -> ParityCheck:
    lemma_conditions = sum(a for a in model.weights if a != 0) == 0
    codim_odd = model.codim_z % 2 == 1
    return ParityCheck(
        lemma_conditions=lemma_conditions,
        codim_odd=codim_odd,
        prediction=lemma_conditions and codim_odd,
    )


###############################################################################
# Report
###############################################################################
@dataclass(frozen=True)
class WallReport:
    model: WallModel
    bases: WindowBases
    structure: StructureMaps
    iota: IotaMaps
    spherical: SphericalData
    compositions: PairCompositions
    ic_primary: CriterionResult
    ic_dual: CriterionResult
    parity: ParityCheck
    defect: int
    dual_defect: int
    kp_ggm: GGMDiagram
    monodromy_charpoly: tuple[Fraction, ...]
    name: str | None = field(default=None, compare=False)

    @property
    def m_plus(self) -> LinearMap:
        return self.spherical.m_plus

    @property
    def m_prime(self) -> Fraction:
        return self.spherical.m_prime

    def matrices(self) -> dict[str, LinearMap]:
        return {
            'res_minus': self.structure.res_minus,
            'res_plus': self.structure.res_plus,
            'res_minus_star': self.structure.res_minus_star,
            'res_plus_star': self.structure.res_plus_star,
            'star_res_minus': self.structure.star_res_minus,
            'star_res_plus': self.structure.star_res_plus,
            'iota_minus': self.iota.iota_minus,
            'iota_plus': self.iota.iota_plus,
            'star_iota_minus': self.iota.star_iota_minus,
            'iota_minus_star': self.iota.iota_minus_star,
            'star_iota_plus': self.iota.star_iota_plus,
            'iota_plus_star': self.iota.iota_plus_star,
            'k_s': self.spherical.k_s,
            'k_s_star': self.spherical.k_s_star,
        }

    def to_dict(self) -> dict:
        data = {'name': self.name} if self.name is not None else {}
        data.update({
            'weights': list(self.model.weights),
            'window_base': self.model.window_base,
            'eta': self.model.eta,
            'codim_z': self.model.codim_z,
            'bases': self.bases.to_dict(),
            'koszul': {
                'q_minus': self.model.q_minus.render(),
                'q_plus': self.model.q_plus.render(),
            },
            'matrices': {name: arrow.to_rows() for name, arrow in self.matrices().items()},
            'm_plus': self.m_plus.to_rows(),
            'm_prime': format_rational(self.m_prime),
            'monodromy_charpoly': [format_rational(c) for c in self.monodromy_charpoly],
            'compositions': self.compositions.to_dict(),
            'ic_primary': self.ic_primary.to_dict(),
            'ic_dual': self.ic_dual.to_dict(),
            'parity': self.parity.to_dict(),
            'defect': self.defect,
            'dual_defect': self.dual_defect,
            'kp_ggm': self.kp_ggm.to_dict(),
        })
        return data


def _cross_check(model: WallModel, res: StructureMaps, iota: IotaMaps, spherical: SphericalData,
                 kp: KSDiagram, pk: KSDiagram) -> list[str]:
    """Every identity the K-level spherical pair must satisfy; returns the failed ones."""
    failures = []

    def expect(condition: bool, message: str) -> None:
        if not condition:
            failures.append(message)

    eta = model.eta
    expect(kp.e0 == eta + 1 and kp.e_minus == eta and kp.e_plus == eta,
           f"dimension ledger {kp.dims} != ({eta}, {eta + 1}, {eta})")
    expect((res.res_minus @ res.res_minus_star).is_identity(), "res- res-* != 1")
    expect((res.res_plus @ res.res_plus_star).is_identity(), "res+ res+* != 1")
    expect((res.res_minus @ res.star_res_minus).is_identity(), "res- *res- != 1")
    expect((res.res_plus @ res.star_res_plus).is_identity(), "res+ *res+ != 1")
    expect((res.res_minus @ iota.iota_minus).is_zero(), "res- iota- != 0")
    expect((res.res_plus @ iota.iota_plus).is_zero(), "res+ iota+ != 0")
    for name, adjoint, embedding in (
        ('*iota- iota-', iota.star_iota_minus, iota.iota_minus),
        ('iota-* iota-', iota.iota_minus_star, iota.iota_minus),
        ('*iota+ iota+', iota.star_iota_plus, iota.iota_plus),
        ('iota+* iota+', iota.iota_plus_star, iota.iota_plus),
    ):
        expect((adjoint @ embedding).is_identity(), f"{name} != 1")

    flop_flop = res.res_plus @ res.res_minus_star @ res.res_minus @ res.res_plus_star
    expect(flop_flop == spherical.m_plus, "res+ res-* res- res+* != 1 - K(S) K(S*)")
    expect(spherical.m_prime == (-1) ** model.codim_z,
           f"cotwist scalar {spherical.m_prime} != (-1)^{model.codim_z}")

    pk_minus = (pk.g_minus @ pk.f_plus).as_scalar()
    pk_plus = (pk.g_plus @ pk.f_minus).as_scalar()
    expect(pk_minus == (-1) ** model.positive_count, f"g-f+ of P^K is {pk_minus}")
    expect(pk_plus == (-1) ** model.negative_count, f"g+f- of P^K is {pk_plus}")
    expect(pk_minus * pk_plus == (-1) ** model.codim_z, "product of P^K scalars != (-1)^codim")

    for label, diagram in (('^K P', kp), ('P^K', pk)):
        if not validate_ks(diagram):
            failures.append(f"{label} is not a valid KS diagram")
            continue
        m_minus, m_plus = monodromies(diagram)
        intertwiner = diagram.g_minus @ diagram.f_plus
        expect(intertwiner @ m_plus == m_minus @ intertwiner, f"{label} monodromies are not conjugate")
        if label == '^K P':
            expect(m_plus == spherical.m_plus, "monodromy of ^K P != m+")
        else:
            expect(m_minus.as_scalar() == spherical.m_prime, "monodromy of P^K != m'")
    return failures


def full_report(model: WallModel, name: str | None = None) -> WallReport:
    """Everything derived from the model, re-verified before it is returned."""
    bases = window_bases(model)
    res = structure_maps(model)
    iota = iota_maps(model)
    spherical = spherical_data(model)
    kp = assemble_kp(model)
    pk = assemble_pk(model)

    failures = _cross_check(model, res, iota, spherical, kp, pk)
    if failures:
        logger.error(f"[KGIT] {len(failures)} cross-checks failed for {list(model.weights)}: {failures}")
        raise InternalInvariantViolation([f"{list(model.weights)}: {f}" for f in failures])

    primary = ic_criterion(model)
    dual = dual_ic_criterion(model)
    parity = parity_check(model)
    kp_ggm, _ = ks_to_ggm(kp)
    pk_ggm, _ = ks_to_ggm(pk)
    defect = defect_report(kp_ggm).skyscraper_count
    dual_defect = defect_report(pk_ggm).skyscraper_count

    checks = (
        (defect == 1 - primary.rank, f"defect {defect} != 1 - rk(m+ - 1) = {1 - primary.rank}"),
        (defect in (0, 1), f"defect {defect} outside {{0, 1}}"),
        ((defect == 0) == primary.saturated, "defect = 0 disagrees with saturation"),
        (dual_defect == model.eta - dual.rank, f"dual defect {dual_defect} != eta - rk(m' - 1)"),
        (not parity.prediction or primary.saturated, "parity predicts saturation but criterion is not saturated"),
        (pair_compositions(model).all_equivalences, "a spherical-pair composite is not invertible"),
    )
    failures = [message for ok, message in checks if not ok]
    if failures:
        logger.error(f"[KGIT] Criterion checks failed for {list(model.weights)}: {failures}")
        raise InternalInvariantViolation([f"{list(model.weights)}: {f}" for f in failures])

    return WallReport(
        model=model,
        bases=bases,
        structure=res,
        iota=iota,
        spherical=spherical,
        compositions=pair_compositions(model),
        ic_primary=primary,
        ic_dual=dual,
        parity=parity,
        defect=defect,
        dual_defect=dual_defect,
        kp_ggm=kp_ggm,
        monodromy_charpoly=tuple(characteristic_polynomial(spherical.m_plus)),
        name=name,
    )


def evaluate_models(models: Sequence[WallModel], workers: int | None = None) -> list[WallReport]:
    """Full reports in input order, on a thread pool when parallel evaluation is enabled."""
    if workers is None:
        workers = config.WORKERS if config.is_parallel_enabled() else 1
    return map_in_order(full_report, models, workers)
