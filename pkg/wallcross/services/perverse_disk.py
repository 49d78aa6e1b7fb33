from dataclasses import dataclass
from typing import Sequence

from wallcross.errors import (
    CertificateFailure,
    InternalInvariantViolation,
    InvalidInput,
    ShapeError,
    SingularMatrix,
)
from wallcross.logging import logger
from wallcross.services.exact_algebra import (
    LinearMap,
    block_diagonal,
    default_basis,
    hstack,
    invert,
    is_invertible,
    kernel_map,
    rank,
    rref,
    vstack,
)


def _sum_labels(first: Sequence[str], second: Sequence[str], prefix: str) -> tuple[str, ...]:
    """Labels for a direct sum; falls back to fresh labels when the summands clash."""
    labels = tuple(first) + tuple(second)
    if len(set(labels)) == len(labels):
        return labels
    return default_basis(prefix, len(labels))


###############################################################################
# Diagrams
###############################################################################
@dataclass(frozen=True)
class GGMDiagram:
    """Vanishing cycles D0 and nearby cycles D1 with u: D1 -> D0 and v: D0 -> D1."""

    d0: int
    d1: int
    u: LinearMap
    v: LinearMap

    def __post_init__(self):
        if self.u.shape != (self.d0, self.d1):
            raise ShapeError(f"u must be {self.d0}x{self.d1} (D1 -> D0), got {self.u.shape}")
        if self.v.shape != (self.d1, self.d0):
            raise ShapeError(f"v must be {self.d1}x{self.d0} (D0 -> D1), got {self.v.shape}")

    @classmethod
    def from_maps(cls, u: LinearMap, v: LinearMap) -> 'GGMDiagram':
        return cls(d0=u.rows, d1=u.cols, u=u, v=v)

    @property
    def m(self) -> LinearMap:
        """Monodromy vu + 1 on D1"""
        return self.v @ self.u + LinearMap.identity(self.u.domain_basis)

    def to_dict(self) -> dict:
        return {
            'dims': {'d0': self.d0, 'd1': self.d1},
            'maps': {'u': self.u.to_rows(), 'v': self.v.to_rows()},
        }


@dataclass(frozen=True)
class KSDiagram:
    """
    Stalk E0 on the skeleton with the two half-line stalks E- and E+.

    f_minus: E- -> E0, f_plus: E+ -> E0, g_minus: E0 -> E-, g_plus: E0 -> E+.
    """

    e_minus: int
    e0: int
    e_plus: int
    f_minus: LinearMap
    f_plus: LinearMap
    g_minus: LinearMap
    g_plus: LinearMap

    def __post_init__(self):
        expected = {
            'f_minus': (self.f_minus, (self.e0, self.e_minus)),
            'f_plus': (self.f_plus, (self.e0, self.e_plus)),
            'g_minus': (self.g_minus, (self.e_minus, self.e0)),
            'g_plus': (self.g_plus, (self.e_plus, self.e0)),
        }
        for name, (arrow, shape) in expected.items():
            if arrow.shape != shape:
                raise ShapeError(f"{name} must be {shape[0]}x{shape[1]}, got {arrow.shape}")

    @classmethod
    def from_maps(cls, f_minus: LinearMap, f_plus: LinearMap,
                  g_minus: LinearMap, g_plus: LinearMap) -> 'KSDiagram':
        return cls(
            e_minus=f_minus.cols,
            e0=f_minus.rows,
            e_plus=f_plus.cols,
            f_minus=f_minus,
            f_plus=f_plus,
            g_minus=g_minus,
            g_plus=g_plus,
        )

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.e_minus, self.e0, self.e_plus

    def to_dict(self) -> dict:
        return {
            'dims': {'e_minus': self.e_minus, 'e0': self.e0, 'e_plus': self.e_plus},
            'maps': {
                'f_minus': self.f_minus.to_rows(),
                'f_plus': self.f_plus.to_rows(),
                'g_minus': self.g_minus.to_rows(),
                'g_plus': self.g_plus.to_rows(),
            },
        }


@dataclass(frozen=True)
class DefectReport:
    vanishing_dim: int
    nearby_rank_drop: int
    skyscraper_count: int
    is_ic: bool

    def to_dict(self) -> dict:
        return {
            'vanishing_dim': self.vanishing_dim,
            'nearby_rank_drop': self.nearby_rank_drop,
            'skyscraper_count': self.skyscraper_count,
            'is_ic': self.is_ic,
        }


@dataclass(frozen=True)
class KSCertificate:
    """
    Isomorphism from a KS diagram to ggm_to_ks of its GGM description.

    alpha acts on E0, phi_minus on E- and psi on E+.
    """

    alpha: LinearMap
    phi_minus: LinearMap
    psi: LinearMap

    def failures(self, source: KSDiagram, target: KSDiagram) -> list[str]:
        found = []
        for name, component in (('alpha', self.alpha), ('phi_minus', self.phi_minus), ('psi', self.psi)):
            if not is_invertible(component):
                found.append(f"{name} is not invertible")
        if found:
            return found
        checks = (
            ('alpha f- = f-\' phi-', self.alpha @ source.f_minus, target.f_minus @ self.phi_minus),
            ('alpha f+ = f+\' psi', self.alpha @ source.f_plus, target.f_plus @ self.psi),
            ('phi- g- = g-\' alpha', self.phi_minus @ source.g_minus, target.g_minus @ self.alpha),
            ('psi g+ = g+\' alpha', self.psi @ source.g_plus, target.g_plus @ self.alpha),
        )
        return [name for name, left, right in checks if left != right]

    def verify(self, source: KSDiagram, target: KSDiagram) -> bool:
        return not self.failures(source, target)


###############################################################################
# Validation
###############################################################################
def validate_ggm(G: GGMDiagram) -> bool:
    """True iff vu + 1 is invertible on D1 (checked against uv + 1 on D0)."""
    on_nearby = is_invertible(G.m)
    on_vanishing = is_invertible(G.u @ G.v + LinearMap.identity(G.u.codomain_basis))
    if on_nearby != on_vanishing:
        raise InternalInvariantViolation(
            f"vu+1 invertible={on_nearby} but uv+1 invertible={on_vanishing}"
        )
    return on_nearby


def validate_ks(K: KSDiagram) -> bool:
    if not (K.g_minus @ K.f_minus).is_identity():
        return False
    if not (K.g_plus @ K.f_plus).is_identity():
        return False
    return is_invertible(K.g_minus @ K.f_plus) and is_invertible(K.g_plus @ K.f_minus)


def _require_ggm(G: GGMDiagram) -> None:
    if not validate_ggm(G):
        raise InvalidInput(f"GGM diagram (d0={G.d0}, d1={G.d1}) has singular vu + 1")


def _require_ks(K: KSDiagram) -> None:
    if not validate_ks(K):
        raise InvalidInput(f"KS diagram with dims {K.dims} violates g+-f+- = 1 or g-+f+- invertible")


###############################################################################
# Conversions
###############################################################################
def ggm_to_ks(G: GGMDiagram) -> KSDiagram:
    """Block diagrams on E0 = D0 + D1: f- = (u;1), g- = (0 1), f+ = (0;1), g+ = (v 1)."""
    _require_ggm(G)
    nearby = G.u.domain_basis
    vanishing = G.u.codomain_basis
    stalk = _sum_labels(vanishing, nearby, 'c')
    one = LinearMap.identity(nearby)

    f_minus = vstack(G.u, one, codomain_basis=stalk)
    f_plus = vstack(LinearMap.zero(nearby, vanishing), one, codomain_basis=stalk)
    g_minus = hstack(LinearMap.zero(vanishing, nearby), one, domain_basis=stalk)
    g_plus = hstack(G.v, one, domain_basis=stalk)
    return KSDiagram.from_maps(f_minus, f_plus, g_minus, g_plus)


def ks_to_ggm(K: KSDiagram) -> tuple[GGMDiagram, KSCertificate]:
    """
    GGM description of a KS diagram, with a checked certificate.

    D1 is E-, D0 is ker g- and E0 splits as ker g- + im f+. u projects f- onto
    ker g- along im f+, v is (g- f+) g+ restricted to ker g-.
    """
    _require_ks(K)
    kernel = kernel_map(K.g_minus)
    d0 = kernel.cols
    vanishing = kernel.domain_basis

    splitting = hstack(kernel, K.f_plus, domain_basis=default_basis('b', K.e0))
    try:
        coordinates = invert(splitting)
    except SingularMatrix as e:
        raise CertificateFailure(f"E0 does not split as ker g- + im f+: {e.message}") from e
    projection = coordinates.select_rows(range(d0), codomain_basis=vanishing)
    complement = coordinates.select_rows(range(d0, K.e0), codomain_basis=K.f_plus.domain_basis)

    psi = K.g_minus @ K.f_plus
    u = projection @ K.f_minus
    v = psi @ K.g_plus @ kernel
    G = GGMDiagram.from_maps(u, v)

    alpha = vstack(projection, psi @ complement,
                   codomain_basis=_sum_labels(vanishing, psi.codomain_basis, 'c'))
    certificate = KSCertificate(alpha=alpha, phi_minus=LinearMap.identity(K.g_minus.codomain_basis), psi=psi)
    failed = certificate.failures(K, ggm_to_ks(G))
    if failed:
        logger.error(f"[DISK] Certificate check failed for dims {K.dims}: {failed}")
        raise CertificateFailure('; '.join(failed))
    logger.debug(f"[DISK] KS {K.dims} -> GGM d0={G.d0}, d1={G.d1}")
    return G, certificate


def monodromies(K: KSDiagram) -> tuple[LinearMap, LinearMap]:
    """m- = g- f+ g+ f- on E- and m+ = g+ f- g- f+ on E+."""
    _require_ks(K)
    m_minus = K.g_minus @ K.f_plus @ K.g_plus @ K.f_minus
    m_plus = K.g_plus @ K.f_minus @ K.g_minus @ K.f_plus
    return m_minus, m_plus


def local_system(K: KSDiagram) -> LinearMap:
    """Monodromy of the generic fibre, read on E+."""
    return monodromies(K)[1]


###############################################################################
# Simple objects and sums
###############################################################################
def ic_from_monodromy(m: LinearMap) -> GGMDiagram:
    """
    IC extension of the local system with monodromy m: F/F^m and F.

    D0 is realised as im(m - 1) on the pivot columns of m - 1, v is that
    inclusion and u the nonzero rows of the rref, so that vu = m - 1.
    """
    if not m.is_square():
        raise ShapeError(f"monodromy must be square, got {m.shape}")
    if not is_invertible(m):
        raise SingularMatrix(f"monodromy of size {m.rows} has rank {rank(m)}")
    fibre = m.domain_basis
    drop = m.with_bases(fibre, fibre) - LinearMap.identity(fibre)
    reduced, pivots = rref(drop)
    vanishing = default_basis('v', len(pivots))
    v = drop.select_columns(pivots, domain_basis=vanishing)
    u = reduced.select_rows(range(len(pivots)), codomain_basis=vanishing)
    if v @ u != drop:
        raise InternalInvariantViolation(f"rank factorisation of m - 1 failed for {m!r}")
    return GGMDiagram.from_maps(u, v)


def skyscraper() -> GGMDiagram:
    """The diagram C <-> 0 of the skyscraper at the origin."""
    return GGMDiagram.from_maps(LinearMap.zero(0, ('v1',)), LinearMap.zero(('v1',), 0))


def zero_diagram() -> GGMDiagram:
    return GGMDiagram.from_maps(LinearMap.zero(0, 0), LinearMap.zero(0, 0))


def direct_sum(A: GGMDiagram, B: GGMDiagram) -> GGMDiagram:
    _require_ggm(A)
    _require_ggm(B)
    vanishing = _sum_labels(A.u.codomain_basis, B.u.codomain_basis, 'v')
    nearby = _sum_labels(A.u.domain_basis, B.u.domain_basis, 'n')
    u = block_diagonal(A.u, B.u, domain_basis=nearby, codomain_basis=vanishing)
    v = block_diagonal(A.v, B.v, domain_basis=vanishing, codomain_basis=nearby)
    return GGMDiagram.from_maps(u, v)


def defect_report(G: GGMDiagram) -> DefectReport:
    """Skyscraper composition factors: dim D0 - rk(m - 1)."""
    _require_ggm(G)
    drop = rank(G.v @ G.u)
    count = G.d0 - drop
    if count < 0:
        raise InternalInvariantViolation(f"d0={G.d0} is smaller than rk(vu)={drop}")
    return DefectReport(vanishing_dim=G.d0, nearby_rank_drop=drop, skyscraper_count=count, is_ic=count == 0)
