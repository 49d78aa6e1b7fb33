from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wallcross.errors import InvalidInput, NonUnitExtremes, ShapeError, SingularMatrix, WidthMismatch
from wallcross.services.exact_algebra import (
    Laurent,
    LinearMap,
    as_rational,
    characteristic_polynomial,
    format_rational,
    invert,
    is_invertible,
    kernel_basis,
    laurent_mul,
    pivot_columns,
    rank,
    window_reduce,
)
from wallcross.services.kgit import build_model
from tests.strategies import balanced_weights, laurents, matrices, square_matrices

ONE_MINUS_T = Laurent({0: 1, 1: -1})


def test_laurent_mul_binomial_square():
    assert laurent_mul(ONE_MINUS_T, ONE_MINUS_T) == Laurent({0: 1, 1: -2, 2: 1})


def test_laurent_mul_negative_exponent():
    square = laurent_mul(ONE_MINUS_T, ONE_MINUS_T)
    assert laurent_mul(Laurent.monomial(-1), square) == Laurent({-1: 1, 0: -2, 1: 1})


def test_laurent_mul_by_zero():
    assert laurent_mul(ONE_MINUS_T, Laurent.zero()).is_zero


def test_laurent_drops_zero_coefficients():
    assert Laurent({0: 1, 3: 0}).support == (0,)
    assert Laurent({2: 1}) - Laurent({2: 1}) == Laurent()


def test_laurent_render():
    assert Laurent({0: 1, 1: -2, 2: 1}).render() == '1 - 2*t + t^2'
    assert Laurent({-2: -1, 0: 1}).render() == '-t^-2 + 1'
    assert Laurent({1: Fraction(1, 2)}).render() == '1/2*t'
    assert Laurent().render() == '0'


def test_laurent_rejects_float_coefficients():
    with pytest.raises(InvalidInput):
        Laurent({0: 0.5})


def test_as_rational_reads_strings():
    assert as_rational('3/4') == Fraction(3, 4)
    assert format_rational(Fraction(4, 2)) == 2
    assert format_rational(Fraction(1, 3)) == '1/3'


def test_window_reduce_modulo_square():
    p = Laurent.monomial(1)
    q = ONE_MINUS_T ** 2
    assert window_reduce(p, q, -1, 2) == Laurent({-1: -1, 0: 2})


def test_window_reduce_negative_modulus():
    q = Laurent({0: 1, -2: -1})
    assert window_reduce(Laurent.monomial(-1), q, 0, 2) == Laurent.monomial(1)


def test_window_reduce_keeps_window_elements():
    p = Laurent({0: 5, 1: -3})
    assert window_reduce(p, ONE_MINUS_T ** 2, 0, 2) == p


def test_window_reduce_clears_content():
    q = Laurent({0: 2, 1: -2})
    assert window_reduce(Laurent.monomial(4), q, 0, 1) == Laurent.one()


def test_window_reduce_width_mismatch():
    with pytest.raises(WidthMismatch):
        window_reduce(Laurent.one(), ONE_MINUS_T ** 2, 0, 3)
    with pytest.raises(WidthMismatch):
        window_reduce(Laurent.one(), Laurent.monomial(2), 0, 0)
    with pytest.raises(WidthMismatch):
        window_reduce(Laurent.one(), Laurent.zero(), 0, 1)


def test_window_reduce_non_unit_extremes():
    with pytest.raises(NonUnitExtremes):
        window_reduce(Laurent.one(), Laurent({0: 1, 1: -2}), 0, 1)


@given(weights=balanced_weights(), p=laurents(-10, 10), lo=st.integers(-5, 5))
def test_window_reduce_gives_the_class_of_p(weights, p, lo):
    model = build_model(weights, 0)
    for q in (model.q_minus, model.q_plus):
        width = q.span
        r = window_reduce(p, q, lo, width)
        assert all(lo <= k < lo + width for k in r.support)
        assert window_reduce(p - r, q, lo + 3, width).is_zero
        assert window_reduce(r, q, lo, width) == r


@given(weights=balanced_weights(), p=laurents(), s=laurents(), lo=st.integers(-4, 4))
def test_window_reduce_is_linear(weights, p, s, lo):
    q = build_model(weights, 0).q_minus
    width = q.span
    combined = window_reduce(p + s.scale(3), q, lo, width)
    assert combined == window_reduce(p, q, lo, width) + window_reduce(s, q, lo, width).scale(3)


def test_rank_of_proportional_columns():
    assert rank(LinearMap([[0, 2], [0, -2]], 2, 2)) == 1
    assert pivot_columns(LinearMap([[0, 2], [0, -2]], 2, 2)) == (1,)


def test_kernel_of_identity_is_empty():
    assert kernel_basis(LinearMap.identity(3)) == []


def test_kernel_basis_uses_free_columns():
    kernel = kernel_basis(LinearMap([[1, 2, 3]], 3, 1))
    assert kernel == [(-2, 1, 0), (-3, 0, 1)]


def test_invert_involution():
    m = LinearMap([[1, 2], [0, -1]], 2, 2)
    assert invert(m) == m


def test_invert_errors():
    with pytest.raises(SingularMatrix):
        invert(LinearMap([[1, 2], [2, 4]], 2, 2))
    with pytest.raises(ShapeError):
        invert(LinearMap([[1, 2]], 2, 1))


def test_empty_maps():
    empty = LinearMap.zero(0, 0)
    assert rank(empty) == 0
    assert invert(empty).shape == (0, 0)
    assert (LinearMap.zero(0, 2) @ LinearMap.zero(3, 0)) == LinearMap.zero(3, 2)


def test_characteristic_polynomial():
    assert characteristic_polynomial(LinearMap([[1, 2], [0, -1]], 2, 2)) == [1, 0, -1]
    assert characteristic_polynomial(LinearMap.zero(0, 0)) == [1]


def test_linear_map_shape_checks():
    with pytest.raises(ShapeError):
        LinearMap([[1, 2]], ('a', 'a'), 1)
    with pytest.raises(ShapeError):
        LinearMap([[1, 2], [3]], 2, 2)
    with pytest.raises(ShapeError):
        LinearMap.identity(2) @ LinearMap.identity(3)


def test_linear_map_equality_ignores_labels():
    assert LinearMap([[1]], ('a',), ('b',)) == LinearMap([[1]], ('c',), ('d',))


@given(m=matrices())
def test_rank_nullity(m):
    kernel = kernel_basis(m)
    assert rank(m) + len(kernel) == m.cols
    for vector in kernel:
        assert (m @ LinearMap.from_columns([vector], 1, m.cols)).is_zero()


@given(m=square_matrices())
def test_invertibility_tests_agree(m):
    invertible = is_invertible(m)
    assert invertible == (rank(m) == m.rows)
    assert invertible == (not kernel_basis(m))
    if invertible:
        assert (invert(m) @ m).is_identity()
        assert (m @ invert(m)).is_identity()


def test_constant_laurents_hash_as_their_scalar():
    assert Laurent.one() == 1 and hash(Laurent.one()) == hash(1)
    assert hash(Laurent()) == hash(0)
    assert hash(Laurent({0: Fraction(1, 2)})) == hash(Fraction(1, 2))
    assert len({Laurent.one(), 1, Fraction(1)}) == 1
    assert {Laurent.monomial(1): 'a'}[Laurent({1: 1})] == 'a'


def test_composites_read_back_as_fractions():
    a = LinearMap([[1, 2], [0, -1]], 2, 2)
    product = a @ a
    assert product.is_identity()
    assert product == LinearMap.identity(2)
    assert all(isinstance(x, Fraction) for row in product.entries for x in row)
    total = product + a - LinearMap.identity(2)
    assert total.to_rows() == [[1, 2], [0, -1]]
    assert hash(total) == hash(a)
    assert (a @ a).with_bases(('p', 'q'), ('r', 's')).codomain_basis == ('r', 's')
    assert (LinearMap.zero(0, 2) - LinearMap.zero(0, 2)).shape == (2, 0)
