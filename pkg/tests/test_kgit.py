import time

import pytest
from hypothesis import given, strategies as st

from wallcross.constants import (
    BUNDLED_FAMILIES,
    SIDE_MINUS,
    SIDE_PLUS,
    local_podd_weights,
    standard_flop_weights,
)
from wallcross.errors import InvalidInput, NotCalabiYau, NoWall
from wallcross.services.exact_algebra import Laurent, LinearMap, rank
from wallcross.services.kgit import (
    assemble_kp,
    assemble_pk,
    build_model,
    dual_ic_criterion,
    evaluate_models,
    full_report,
    ic_criterion,
    iota_maps,
    koszul_class,
    pair_compositions,
    parity_check,
    spherical_data,
    structure_maps,
    window_bases,
)
from wallcross.services.perverse_disk import monodromies, validate_ks
from tests.strategies import balanced_weights


def _rows(arrow: LinearMap) -> list[list[int]]:
    return [[int(x) for x in row] for row in arrow.entries]


def _column(arrow: LinearMap) -> list[int]:
    return [int(x) for x in arrow.column(0)]


# build_model

def test_local_p1_model(local_p1):
    assert local_p1.eta == 2
    assert local_p1.codim_z == 3
    assert local_p1.q_minus == Laurent({0: 1, 1: -2, 2: 1})
    assert local_p1.q_plus == Laurent({0: 1, -2: -1})


def test_conifold_model(conifold):
    assert (conifold.eta, conifold.codim_z) == (2, 4)


def test_build_model_rejections():
    with pytest.raises(NotCalabiYau):
        build_model((1, 1, -3), 0)
    with pytest.raises(NoWall):
        build_model((1, 1), 0)
    with pytest.raises(NoWall):
        build_model((0, 0, 0), 0)
    with pytest.raises(InvalidInput):
        build_model((1, 1.0, -2), 0)


def test_zero_weights_span_the_fixed_locus():
    model = build_model((0, 1, 0, -1), 0)
    assert (model.eta, model.codim_z) == (1, 2)


def test_window_bases(local_p1):
    bases = window_bases(local_p1)
    assert bases.c_basis == (-1, 0, 1)
    assert bases.g_minus_basis == (-1, 0)
    assert bases.g_plus_basis == (0, 1)


# koszul classes

def test_koszul_classes_of_local_p1(local_p1):
    assert koszul_class(local_p1, SIDE_MINUS, -1) == Laurent({-1: 1, 0: -2, 1: 1})
    assert koszul_class(local_p1, SIDE_PLUS, 1) == Laurent({1: 1, -1: -1})


def test_koszul_class_rejects_unknown_side(local_p1):
    with pytest.raises(InvalidInput):
        koszul_class(local_p1, '0', 0)


@pytest.mark.parametrize('d', [1, 2, 3, 4])
def test_standard_flop_koszul_classes_agree_up_to_sign(d):
    model = build_model(standard_flop_weights(d), 0)
    flipped = koszul_class(model, SIDE_PLUS, 0).shift(d).scale((-1) ** d)
    assert koszul_class(model, SIDE_MINUS, 0) == flipped


# structure and iota maps

def test_restrictions_of_local_p1(local_p1):
    res = structure_maps(local_p1)
    assert _rows(res.res_minus) == [[1, 0, -1], [0, 1, 2]]
    assert [int(x) for x in res.res_minus.column(2)] == [-1, 2]
    assert _rows(res.res_plus) == [[0, 1, 0], [1, 0, 1]]
    assert [int(x) for x in res.res_plus.column(0)] == [0, 1]
    assert _rows(res.star_res_minus) == [[0, 0], [2, 1], [-1, 0]]
    assert res.res_minus.codomain_basis == ('t^-1', '1')
    assert res.res_plus.codomain_basis == ('1', 't')


def test_restrictions_split_their_adjoints(local_p1, conifold):
    for model in (local_p1, conifold, build_model((2, 1, -3), 1)):
        res = structure_maps(model)
        assert (res.res_minus @ res.res_minus_star).is_identity()
        assert (res.res_plus @ res.res_plus_star).is_identity()
        assert (res.res_minus @ res.star_res_minus).is_identity()
        assert (res.res_plus @ res.star_res_plus).is_identity()


def test_iota_of_local_p1(local_p1):
    iota = iota_maps(local_p1)
    assert _column(iota.iota_minus) == [1, -2, 1]
    assert _column(iota.iota_plus) == [-1, 0, 1]
    assert (iota.iota_minus_star @ iota.iota_minus).as_scalar() == 1
    assert (iota.iota_plus_star @ iota.iota_minus).as_scalar() == -1


def test_spherical_data_of_local_p1(local_p1):
    data = spherical_data(local_p1)
    assert _column(data.k_s) == [-2, 2]
    assert _rows(data.k_s_star) == [[0, 1]]
    assert _rows(data.m_plus) == [[1, 2], [0, -1]]
    assert data.m_prime == -1


def test_spherical_data_of_conifold(conifold):
    data = spherical_data(conifold)
    assert data.k_s.is_zero()
    assert data.m_plus.is_identity()
    assert data.m_prime == 1


def test_pair_compositions_are_equivalences(local_p1):
    compositions = pair_compositions(local_p1)
    assert compositions.iota_plus_star_iota_minus.as_scalar() == -1
    assert compositions.iota_minus_star_iota_plus.as_scalar() == 1
    assert compositions.all_equivalences


# assembled diagrams

def test_assemble_kp_of_local_p1(local_p1):
    K = assemble_kp(local_p1)
    assert K.dims == (2, 3, 2)
    assert validate_ks(K)
    assert monodromies(K)[1] == spherical_data(local_p1).m_plus


def test_assemble_kp_of_conifold(conifold):
    K = assemble_kp(conifold)
    assert validate_ks(K)
    m_minus, m_plus = monodromies(K)
    assert m_minus.is_identity() and m_plus.is_identity()


def test_assemble_pk(local_p1, conifold):
    K = assemble_pk(local_p1)
    assert K.dims == (1, 3, 1)
    assert validate_ks(K)
    assert monodromies(K)[0].as_scalar() == -1
    assert monodromies(assemble_pk(conifold))[0].as_scalar() == 1


# criteria

def test_criteria_of_local_p1(local_p1):
    assert ic_criterion(local_p1).to_dict() == {'rank': 1, 'bound': 1, 'saturated': True}
    assert dual_ic_criterion(local_p1).to_dict() == {'rank': 1, 'bound': 2, 'saturated': False}
    assert parity_check(local_p1).to_dict() == {'lemma_conditions': True, 'codim_odd': True, 'prediction': True}


def test_criteria_of_conifold(conifold):
    assert ic_criterion(conifold).to_dict() == {'rank': 0, 'bound': 1, 'saturated': False}
    assert dual_ic_criterion(conifold).to_dict() == {'rank': 0, 'bound': 2, 'saturated': False}
    assert parity_check(conifold).prediction is False


@pytest.mark.parametrize('n', [1, 2, 3])
def test_local_podd_is_saturated(n):
    model = build_model(local_podd_weights(n), 0)
    assert parity_check(model).prediction
    assert ic_criterion(model).saturated


@pytest.mark.parametrize('d', [1, 2, 3, 4])
def test_standard_flops_are_not_saturated(d):
    model = build_model(standard_flop_weights(d), 0)
    report = full_report(model)
    assert report.spherical.k_s.is_zero()
    assert not report.ic_primary.saturated
    assert report.defect == 1


@pytest.mark.parametrize('weights', [(2, 1, -3), (2, -1, -1)])
def test_odd_codimension_predicts_saturation(weights):
    model = build_model(weights, 0)
    assert model.codim_z == 3
    assert parity_check(model).prediction
    assert ic_criterion(model).saturated


def test_even_codimension_can_still_saturate():
    model = build_model((1, 1, 1, 1, -2, -2), 0)
    assert (model.eta, model.codim_z) == (4, 6)
    assert not parity_check(model).prediction
    assert not spherical_data(model).k_s.is_zero()
    assert ic_criterion(model).saturated


@pytest.mark.parametrize('c', [1, 2, 3, 4])
def test_dual_criterion_never_saturates_in_codimension_two(c):
    model = build_model((c, -c), 0)
    assert spherical_data(model).m_prime == 1
    assert not dual_ic_criterion(model).saturated


# reports

def test_full_report_of_local_p1(local_p1):
    report = full_report(local_p1, name='local_p1')
    assert report.defect == 0
    assert report.dual_defect == 1
    assert (report.kp_ggm.d0, report.kp_ggm.d1) == (1, 2)
    assert list(report.monodromy_charpoly) == [1, 0, -1]
    data = report.to_dict()
    assert data['name'] == 'local_p1'
    assert data['bases'] == {'c': [-1, 0, 1], 'g_minus': [-1, 0], 'g_plus': [0, 1]}
    assert data['matrices']['iota_minus'] == [[1], [-2], [1]]
    assert data['matrices']['iota_plus'] == [[-1], [0], [1]]
    assert data['m_plus'] == [[1, 2], [0, -1]]
    assert data['m_prime'] == -1
    assert data['koszul'] == {'q_minus': '1 - 2*t + t^2', 'q_plus': '-t^-2 + 1'}


def test_full_report_of_conifold(conifold):
    report = full_report(conifold)
    assert report.defect == 1
    assert report.dual_defect == 2
    assert 'name' not in report.to_dict()


@pytest.mark.parametrize('name, weights, base', BUNDLED_FAMILIES)
def test_bundled_families_pass_every_cross_check(name, weights, base):
    report = full_report(build_model(weights, base))
    expected_ic = not (name == 'conifold' or name.startswith('standard_flop'))
    assert report.ic_primary.saturated == expected_ic


def test_evaluate_models_keeps_order():
    models = [build_model(weights, base) for _, weights, base in BUNDLED_FAMILIES]
    reports = evaluate_models(models, workers=4)
    assert [r.model for r in reports] == models
    assert [r.defect for r in reports] == [r.defect for r in evaluate_models(models, workers=1)]


@given(weights=balanced_weights(), base=st.integers(-3, 3))
def test_report_invariants(weights, base):
    model = build_model(weights, base)
    report = full_report(model)
    data = report.spherical
    res = report.structure
    flop_flop = res.res_plus @ res.res_minus_star @ res.res_minus @ res.res_plus_star
    assert flop_flop == data.m_plus
    assert data.m_prime == (-1) ** model.codim_z
    assert rank(data.m_plus - LinearMap.identity(model.eta)) == report.ic_primary.rank
    assert report.defect in (0, 1)
    assert (report.defect == 0) == report.ic_primary.saturated
    if report.parity.prediction:
        assert report.ic_primary.saturated
    pk = assemble_pk(model)
    assert (pk.g_minus @ pk.f_plus).as_scalar() == (-1) ** model.positive_count
    assert (pk.g_plus @ pk.f_minus).as_scalar() == (-1) ** model.negative_count


@given(weights=balanced_weights(), base=st.integers(-3, 3), shift=st.integers(1, 3), data=st.data())
def test_report_ignores_order_and_window_base(weights, base, shift, data):
    report = full_report(build_model(weights, base))
    permuted = data.draw(st.permutations(weights))
    assert full_report(build_model(permuted, base)).matrices() == report.matrices()
    moved = full_report(build_model(weights, base + shift))
    assert moved.matrices() == report.matrices()
    assert (moved.ic_primary, moved.ic_dual, moved.defect) == (report.ic_primary, report.ic_dual, report.defect)


@pytest.mark.parametrize('name, weights, base', BUNDLED_FAMILIES)
def test_bundled_reports_are_fast(name, weights, base):
    started = time.perf_counter()
    full_report(build_model(weights, base + 7))
    assert time.perf_counter() - started < 1
