from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from wallcross.errors import (
    InternalInvariantViolation,
    InvalidInput,
    NonUnitExtremes,
    ShapeError,
    SingularMatrix,
    WidthMismatch,
)

def as_rational(value) -> Fraction:
    """Read an exact rational; floats are refused so that every check stays exact"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInput(f"boolean {value!r} is not a coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise InvalidInput(f"cannot read {value!r} as a rational: {e}") from e
    if hasattr(value, 'p') and hasattr(value, 'q'):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, 'numerator') and hasattr(value, 'denominator') and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise InvalidInput(f"{value!r} ({type(value).__name__}) is not an exact rational")


def _to_qq(value: Fraction):
    return QQ(value.numerator, value.denominator)


def _from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def format_rational(value: Fraction) -> int | str:
    """Integers stay integers in reports, anything else is written p/q"""
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


###############################################################################
# Laurent polynomials in one variable
###############################################################################
class Laurent:
    """
    Element of Q[t, t^-1], stored as a finite map exponent -> coefficient.

    Zero coefficients are never stored, so two Laurents are equal exactly when
    their maps are equal. Instances are treated as immutable.
    """

    __slots__ = ('_coeffs',)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        cleaned = {}
        for exponent, value in (coeffs or {}).items():
            if isinstance(exponent, bool) or not isinstance(exponent, int):
                raise InvalidInput(f"Laurent exponent {exponent!r} is not an integer")
            coefficient = as_rational(value)
            if coefficient != 0:
                cleaned[exponent] = coefficient
        self._coeffs = dict(sorted(cleaned.items()))

    @classmethod
    def zero(cls) -> 'Laurent':
        return cls()

    @classmethod
    def one(cls) -> 'Laurent':
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent: int, coefficient=1) -> 'Laurent':
        return cls({exponent: coefficient})

    def items(self) -> list[tuple[int, Fraction]]:
        return list(self._coeffs.items())

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def coeff(self, exponent: int) -> Fraction:
        return self._coeffs.get(exponent, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self._coeffs)

    @property
    def top_degree(self) -> int:
        if not self._coeffs:
            raise InvalidInput("the zero Laurent polynomial has no degree")
        return max(self._coeffs)

    @property
    def bottom_degree(self) -> int:
        if not self._coeffs:
            raise InvalidInput("the zero Laurent polynomial has no degree")
        return min(self._coeffs)

    @property
    def span(self) -> int:
        return self.top_degree - self.bottom_degree

    def shift(self, k: int) -> 'Laurent':
        """Multiply by t^k"""
        return Laurent({e + k: c for e, c in self._coeffs.items()})

    def scale(self, factor) -> 'Laurent':
        factor = as_rational(factor)
        return Laurent({e: c * factor for e, c in self._coeffs.items()})

    def to_vector(self, exponents: Sequence[int]) -> tuple[Fraction, ...]:
        """Coordinates on the given monomials; fails if the support is not covered"""
        outside = set(self._coeffs) - set(exponents)
        if outside:
            raise ShapeError(f"support {sorted(outside)} lies outside basis {list(exponents)}")
        return tuple(self.coeff(e) for e in exponents)

    def __add__(self, other) -> 'Laurent':
        other = _as_laurent(other)
        merged = dict(self._coeffs)
        for e, c in other._coeffs.items():
            merged[e] = merged.get(e, 0) + c
        return Laurent(merged)

    __radd__ = __add__

    def __neg__(self) -> 'Laurent':
        return Laurent({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other) -> 'Laurent':
        return self + (-_as_laurent(other))

    def __rsub__(self, other) -> 'Laurent':
        return _as_laurent(other) - self

    def __mul__(self, other) -> 'Laurent':
        return laurent_mul(self, _as_laurent(other))

    __rmul__ = __mul__

    def __pow__(self, power: int) -> 'Laurent':
        if not isinstance(power, int) or power < 0:
            raise InvalidInput(f"only non-negative integer powers are supported, got {power!r}")
        result = Laurent.one()
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Laurent):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._coeffs == Laurent({0: other})._coeffs
        return NotImplemented

    def __hash__(self) -> int:
        # constants hash as their scalar, they compare equal to it
        if not self._coeffs.keys() - {0}:
            return hash(self.coeff(0))
        return hash(tuple(self._coeffs.items()))

    def render(self, var: str = 't') -> str:
        if not self._coeffs:
            return '0'
        parts = []
        for exponent, coefficient in self._coeffs.items():
            if exponent == 0:
                monomial = ''
            elif exponent == 1:
                monomial = var
            else:
                monomial = f"{var}^{exponent}"
            magnitude = abs(coefficient)
            if monomial and magnitude == 1:
                body = monomial
            elif monomial:
                body = f"{format_rational(magnitude)}*{monomial}"
            else:
                body = str(format_rational(magnitude))
            sign = '-' if coefficient < 0 else '+'
            if not parts:
                parts.append(body if sign == '+' else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return ' '.join(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Laurent({self.render()})"


def _as_laurent(value) -> Laurent:
    if isinstance(value, Laurent):
        return value
    return Laurent({0: value})


def laurent_mul(a: Laurent, b: Laurent) -> Laurent:
    """Convolution product of two Laurent polynomials."""
    product: dict[int, Fraction] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            product[ea + eb] = product.get(ea + eb, 0) + ca * cb
    return Laurent(product)


def primitive_part(q: Laurent) -> Laurent:
    """Scale q to coprime integer coefficients"""
    if q.is_zero:
        return q
    denominators = lcm(*(c.denominator for _, c in q.items()))
    numerators = [int(c * denominators) for _, c in q.items()]
    content = gcd(*numerators)
    return q.scale(Fraction(denominators, content))


def _check_modulus(q: Laurent, width: int) -> None:
    if q.is_zero:
        raise WidthMismatch("modulus is zero")
    if width < 1 or width != q.span:
        raise WidthMismatch(f"window width {width} does not match modulus span {q.span} of {q}")
    reduced = primitive_part(q)
    extremes = (reduced.coeff(reduced.top_degree), reduced.coeff(reduced.bottom_degree))
    if any(abs(c) != 1 for c in extremes):
        raise NonUnitExtremes(f"extreme coefficients {[str(c) for c in extremes]} of {q} are not units")


def window_reduce(p: Laurent, q: Laurent, lo: int, width: int) -> Laurent:
    """
    Unique representative of p modulo q supported in [lo, lo + width - 1].

    Exponents above the window are cancelled with the top term of a shifted q,
    exponents below it with the bottom term. The quotient is tracked so that
    p - r = q * quotient is checked exactly before returning.
    """
    _check_modulus(q, width)
    hi = lo + width - 1
    q_items = q.items()
    q_top, q_bottom = q.top_degree, q.bottom_degree
    lead, trail = q.coeff(q_top), q.coeff(q_bottom)

    remainder = p.coeffs
    quotient: dict[int, Fraction] = {}

    def _subtract(factor: Fraction, shift: int) -> None:
        quotient[shift] = quotient.get(shift, 0) + factor
        for e, c in q_items:
            key = e + shift
            value = remainder.get(key, 0) - factor * c
            if value:
                remainder[key] = value
            else:
                remainder.pop(key, None)

    while remainder and max(remainder) > hi:
        d = max(remainder)
        _subtract(remainder[d] / lead, d - q_top)
    while remainder and min(remainder) < lo:
        d = min(remainder)
        _subtract(remainder[d] / trail, d - q_bottom)

    result = Laurent(remainder)
    if laurent_mul(q, Laurent(quotient)) != p - result:
        raise InternalInvariantViolation(f"window reduction of {p} modulo {q} left a non-multiple")
    return result


###############################################################################
# Linear maps with labelled bases
###############################################################################
def default_basis(prefix: str, size: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(1, size + 1))


def _normalize_basis(basis: Sequence[str] | int, prefix: str) -> tuple[str, ...]:
    if isinstance(basis, int) and not isinstance(basis, bool):
        if basis < 0:
            raise ShapeError(f"negative dimension {basis}")
        return default_basis(prefix, basis)
    labels = tuple(str(label) for label in basis)
    if len(set(labels)) != len(labels):
        raise ShapeError(f"duplicate basis labels in {list(labels)}")
    return labels


class LinearMap:
    """
    Exact rational matrix between labelled bases.

    Column j is the image of domain_basis[j] written in codomain_basis.
    Equality looks at the shape and the entries only; labels are presentation.
    """

    __slots__ = ('_entries', 'domain_basis', 'codomain_basis', '_dm')

    def __init__(self, entries: Iterable[Iterable], domain_basis: Sequence[str] | int,
                 codomain_basis: Sequence[str] | int):
        self.domain_basis = _normalize_basis(domain_basis, 'x')
        self.codomain_basis = _normalize_basis(codomain_basis, 'y')
        rows = tuple(tuple(as_rational(x) for x in row) for row in entries)
        if len(rows) != len(self.codomain_basis):
            raise ShapeError(f"{len(rows)} rows but codomain basis has {len(self.codomain_basis)} labels")
        for row in rows:
            if len(row) != len(self.domain_basis):
                raise ShapeError(f"row of length {len(row)} but domain basis has {len(self.domain_basis)} labels")
        self._entries = rows
        self._dm = None

    @classmethod
    def _from_dm(cls, dm: DomainMatrix, domain_basis, codomain_basis) -> 'LinearMap':
        """Wrap an exact result; entries are converted to Fraction only when read"""
        result = cls.__new__(cls)
        result.domain_basis = _normalize_basis(domain_basis, 'x')
        result.codomain_basis = _normalize_basis(codomain_basis, 'y')
        if tuple(dm.shape) != (len(result.codomain_basis), len(result.domain_basis)):
            raise ShapeError(f"matrix of shape {tuple(dm.shape)} does not fit bases "
                             f"{len(result.domain_basis)} -> {len(result.codomain_basis)}")
        result._entries = None
        result._dm = dm
        return result

    @classmethod
    def identity(cls, basis: Sequence[str] | int) -> 'LinearMap':
        labels = _normalize_basis(basis, 'e')
        size = len(labels)
        return cls([[int(i == j) for j in range(size)] for i in range(size)], labels, labels)

    @classmethod
    def zero(cls, domain_basis: Sequence[str] | int, codomain_basis: Sequence[str] | int) -> 'LinearMap':
        domain = _normalize_basis(domain_basis, 'x')
        codomain = _normalize_basis(codomain_basis, 'y')
        return cls([[0] * len(domain) for _ in codomain], domain, codomain)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], domain_basis, codomain_basis) -> 'LinearMap':
        codomain = _normalize_basis(codomain_basis, 'y')
        rows = [[column[i] for column in columns] for i in range(len(codomain))]
        return cls(rows, domain_basis, codomain)

    @property
    def rows(self) -> int:
        return len(self.codomain_basis)

    @property
    def cols(self) -> int:
        return len(self.domain_basis)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def entries(self) -> tuple[tuple[Fraction, ...], ...]:
        if self._entries is None:
            self._entries = tuple(tuple(_from_qq(x) for x in row) for row in self._dm.to_list())
        return self._entries

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j] for row in self.entries)

    def to_rows(self) -> list[list[int | str]]:
        return [[format_rational(x) for x in row] for row in self.entries]

    def domain_matrix(self) -> DomainMatrix:
        if self._dm is None:
            rows = [[_to_qq(x) for x in row] for row in self._entries]
            self._dm = DomainMatrix(rows, self.shape, QQ)
        return self._dm

    def _raw_rows(self) -> list[list]:
        """Rows as stored, Fraction or QQ elements; both compare with ints"""
        if self._entries is not None:
            return self._entries
        return self._dm.to_list()

    def with_bases(self, domain_basis=None, codomain_basis=None) -> 'LinearMap':
        domain_basis = self.domain_basis if domain_basis is None else domain_basis
        codomain_basis = self.codomain_basis if codomain_basis is None else codomain_basis
        if self._entries is None:
            return LinearMap._from_dm(self._dm, domain_basis, codomain_basis)
        return LinearMap(self._entries, domain_basis, codomain_basis)

    def __matmul__(self, other: 'LinearMap') -> 'LinearMap':
        """Composition self after other"""
        if not isinstance(other, LinearMap):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"cannot compose {self.shape} after {other.shape}")
        if 0 in (self.rows, self.cols, other.cols):
            return LinearMap.zero(other.domain_basis, self.codomain_basis)
        product = self.domain_matrix().matmul(other.domain_matrix())
        return LinearMap._from_dm(product, other.domain_basis, self.codomain_basis)

    def _check_same_shape(self, other: 'LinearMap', op: str) -> None:
        if not isinstance(other, LinearMap) or self.shape != other.shape:
            shape = other.shape if isinstance(other, LinearMap) else type(other).__name__
            raise ShapeError(f"cannot {op} {self.shape} and {shape}")

    def __add__(self, other: 'LinearMap') -> 'LinearMap':
        self._check_same_shape(other, 'add')
        if 0 in self.shape:
            return LinearMap.zero(self.domain_basis, self.codomain_basis)
        total = self.domain_matrix().to_dense() + other.domain_matrix().to_dense()
        return LinearMap._from_dm(total, self.domain_basis, self.codomain_basis)

    def __sub__(self, other: 'LinearMap') -> 'LinearMap':
        self._check_same_shape(other, 'subtract')
        if 0 in self.shape:
            return LinearMap.zero(self.domain_basis, self.codomain_basis)
        difference = self.domain_matrix().to_dense() - other.domain_matrix().to_dense()
        return LinearMap._from_dm(difference, self.domain_basis, self.codomain_basis)

    def __neg__(self) -> 'LinearMap':
        return self.scale(-1)

    def scale(self, factor) -> 'LinearMap':
        factor = as_rational(factor)
        return LinearMap([[x * factor for x in row] for row in self.entries],
                         self.domain_basis, self.codomain_basis)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        if self.shape != other.shape:
            return False
        if 0 in self.shape:
            return True
        if self._entries is not None and other._entries is not None:
            return self._entries == other._entries
        return self.domain_matrix().to_list() == other.domain_matrix().to_list()

    def __hash__(self) -> int:
        return hash((self.shape, self.entries))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_identity(self) -> bool:
        return self.is_square() and all(
            x == (1 if i == j else 0) for i, row in enumerate(self._raw_rows()) for j, x in enumerate(row)
        )

    def is_zero(self) -> bool:
        return all(x == 0 for row in self._raw_rows() for x in row)

    def as_scalar(self) -> Fraction:
        if self.shape != (1, 1):
            raise ShapeError(f"expected a 1x1 map, got {self.shape}")
        return self.entries[0][0]

    def select_columns(self, indices: Sequence[int], domain_basis=None) -> 'LinearMap':
        rows = [[row[j] for j in indices] for row in self.entries]
        labels = domain_basis if domain_basis is not None else [self.domain_basis[j] for j in indices]
        return LinearMap(rows, labels, self.codomain_basis)

    def select_rows(self, indices: Sequence[int], codomain_basis=None) -> 'LinearMap':
        rows = [self.entries[i] for i in indices]
        labels = codomain_basis if codomain_basis is not None else [self.codomain_basis[i] for i in indices]
        return LinearMap(rows, self.domain_basis, labels)

    def __repr__(self) -> str:
        return f"LinearMap({self.rows}x{self.cols}, {self.to_rows()})"


def hstack(left: LinearMap, right: LinearMap, domain_basis=None) -> LinearMap:
    """[left | right] on a shared codomain."""
    if left.rows != right.rows:
        raise ShapeError(f"cannot place {left.shape} beside {right.shape}")
    rows = [ra + rb for ra, rb in zip(left.entries, right.entries)]
    labels = domain_basis if domain_basis is not None else left.domain_basis + right.domain_basis
    return LinearMap(rows, labels, left.codomain_basis)


def vstack(top: LinearMap, bottom: LinearMap, codomain_basis=None) -> LinearMap:
    """[top ; bottom] on a shared domain."""
    if top.cols != bottom.cols:
        raise ShapeError(f"cannot stack {top.shape} over {bottom.shape}")
    labels = codomain_basis if codomain_basis is not None else top.codomain_basis + bottom.codomain_basis
    return LinearMap(top.entries + bottom.entries, top.domain_basis, labels)


def block_diagonal(a: LinearMap, b: LinearMap, domain_basis=None, codomain_basis=None) -> LinearMap:
    rows = [row + (Fraction(0),) * b.cols for row in a.entries]
    rows += [(Fraction(0),) * a.cols + row for row in b.entries]
    return LinearMap(
        rows,
        domain_basis if domain_basis is not None else a.domain_basis + b.domain_basis,
        codomain_basis if codomain_basis is not None else a.codomain_basis + b.codomain_basis,
    )


def rref(M: LinearMap) -> tuple[LinearMap, tuple[int, ...]]:
    """Reduced row echelon form over QQ and its pivot columns."""
    if M.rows == 0 or M.cols == 0:
        return M, ()
    reduced, pivots = M.domain_matrix().rref()
    return LinearMap._from_dm(reduced, M.domain_basis, M.codomain_basis), tuple(int(p) for p in pivots)


def pivot_columns(M: LinearMap) -> tuple[int, ...]:
    return rref(M)[1]


def rank(M: LinearMap) -> int:
    return len(pivot_columns(M))


def kernel_basis(M: LinearMap) -> list[tuple[Fraction, ...]]:
    """One kernel vector per free column of the rref, with a 1 in that column."""
    reduced, pivots = rref(M)
    basis = []
    for free in (j for j in range(M.cols) if j not in pivots):
        vector = [Fraction(0)] * M.cols
        vector[free] = Fraction(1)
        for i, p in enumerate(pivots):
            vector[p] = -reduced.entry(i, free)
        basis.append(tuple(vector))
    return basis


def kernel_map(M: LinearMap, labels: Sequence[str] | None = None) -> LinearMap:
    """Inclusion of ker M into the domain of M, columns from kernel_basis."""
    vectors = kernel_basis(M)
    basis = labels if labels is not None else default_basis('k', len(vectors))
    return LinearMap.from_columns(vectors, basis, M.domain_basis)


def is_invertible(M: LinearMap) -> bool:
    return M.is_square() and rank(M) == M.rows


def invert(M: LinearMap) -> LinearMap:
    """Exact inverse; the result maps codomain labels back to domain labels."""
    if not M.is_square():
        raise ShapeError(f"cannot invert a {M.rows}x{M.cols} map")
    if M.rows == 0:
        return LinearMap.zero(M.codomain_basis, M.domain_basis)
    if rank(M) < M.rows:
        raise SingularMatrix(f"map of rank {rank(M)} on a space of dimension {M.rows} is not invertible")
    return LinearMap._from_dm(M.domain_matrix().inv(), M.codomain_basis, M.domain_basis)


def characteristic_polynomial(M: LinearMap) -> list[Fraction]:
    """Coefficients of det(x - M), highest degree first."""
    if not M.is_square():
        raise ShapeError(f"characteristic polynomial of a {M.rows}x{M.cols} map")
    if M.rows == 0:
        return [Fraction(1)]
    return [_from_qq(c) for c in M.domain_matrix().charpoly()]
