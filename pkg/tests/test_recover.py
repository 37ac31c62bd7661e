"""Parameter validation, default windows, recovery reports and the ambient cross-check."""
import json
import math

import numpy as np
import pytest

from cechrecon import generators as gen
from cechrecon.complex import filtered_cech
from cechrecon.errors import AlphaOutOfRange, DensityTooLow, EmptySample, EpsilonOutOfRange
from cechrecon.homology import induced_rank_oracle
from cechrecon.metric import EuclideanCloud
from cechrecon.recover import (
    NSW_DENSITY,
    NSW_RADIUS,
    RecoveryParams,
    default_params,
    estimate_d,
    nsw_reconstruct_check,
    recover_homology,
    validate_params,
)


# -- validation ---------------------------------------------------------------------------


def test_validate_circle_parameters():
    p = validate_params(1.0, 0.224, 0.5, 0.5)
    assert isinstance(p, RecoveryParams) and p.epsilon == 0.5


def test_validate_rejects():
    with pytest.raises(DensityTooLow):
        validate_params(1.0, 0.4, 0.5, 0.5)
    with pytest.raises(DensityTooLow):
        validate_params(1.0, 1 / 3, 0.7, 0.2)
    # 0.59 < 2d = 0.6
    with pytest.raises(AlphaOutOfRange):
        validate_params(1.0, 0.3, 0.59, 0.41)
    with pytest.raises(AlphaOutOfRange):
        validate_params(1.0, 0.3, 0.7, 0.3)  # alpha must stay below tau - d
    with pytest.raises(EpsilonOutOfRange):
        validate_params(1.0, 0.2, 0.5, 0.2)  # eps must exceed d
    with pytest.raises(EpsilonOutOfRange):
        validate_params(1.0, 0.2, 0.5, 0.51)  # eps <= tau - alpha
    with pytest.raises(ValueError):
        validate_params(0.0, 0.1, 0.5, 0.5)


def test_interval_endpoints():
    # eps = tau - alpha is admitted, alpha = 2d only with closed_alpha
    validate_params(1.0, 0.3, 0.61, 0.39)
    with pytest.raises(AlphaOutOfRange):
        validate_params(1.0, 0.25, 0.5, 0.5)
    validate_params(1.0, 0.25, 0.5, 0.5, closed_alpha=True)


def test_default_params():
    alpha, eps = default_params(1.0, 0.224)
    assert alpha == pytest.approx(0.448) and eps == pytest.approx(0.552)
    validate_params(1.0, 0.224, alpha, eps, closed_alpha=True)
    assert default_params(2.0, 0.0) == (1.0, 1.0)
    # 0.9 < 3/3, so this one is admissible
    assert default_params(3.0, 0.9) == pytest.approx((1.8, 1.2))
    with pytest.raises(DensityTooLow):
        default_params(3.0, 1.0)
    alpha, eps = default_params(1.0, 0.2, finite_sample=False)
    validate_params(1.0, 0.2, alpha, eps)


# -- recovery -----------------------------------------------------------------------------


def test_recover_circle_a14():
    fx = gen.circle_sample(14)
    rep = recover_homology(fx["A"], validate_params(1.0, 0.224, 0.5, 0.5), verify=True)
    assert rep.betti_claim == [1, 1, 0]
    assert not rep.warnings
    assert all(b.birth <= 1.5 for b in rep.barcode)


def test_recover_from_point_cloud():
    fx = gen.circle_sample(14)
    rep = recover_homology(fx.cloud, validate_params(1.0, 0.224, 0.5, 0.5))
    assert rep.betti_claim == [1, 1, 0]


def test_recover_a20_defaults_with_oracle():
    fx = gen.circle_sample(20)
    d = 2 * math.sin(math.pi / 40)
    params = validate_params(1.0, d, *default_params(1.0, d), closed_alpha=True)
    rep = recover_homology(fx["A"], params)
    assert rep.betti_claim == [1, 1, 0]
    F = filtered_cech(fx["A"], fx["A"], 3)
    assert [induced_rank_oracle(F, k, params.alpha, params.alpha + params.epsilon) for k in range(3)] == [1, 1, 0]


def test_recover_single_point():
    space = EuclideanCloud(np.array([[0.3, 0.1]])).metric()
    params = validate_params(1.0, 0.0, *default_params(1.0, 0.0))
    assert recover_homology(space.full(), params).betti_claim == [1, 0, 0]
    with pytest.raises(EmptySample):
        recover_homology(space.subset([]), params)


@pytest.mark.parametrize("q", [10, 14, 20])
def test_interval_insensitivity(q):
    fx = gen.circle_sample(q)
    d = fx.facts["d_H"]
    F_claims = set()
    for a in np.linspace(2 * d, 1 - d, 7)[1:-1]:
        for e in np.linspace(d, 1 - a, 6)[1:]:
            params = validate_params(1.0, d, float(a), float(e))
            F_claims.add(tuple(recover_homology(fx["A"], params).betti_claim))
    assert F_claims == {(1, 1, 0)}


def test_two_point_refuses():
    fx = gen.two_point_space(1.0)
    with pytest.raises(DensityTooLow):
        validate_params(fx.facts["tau"], fx.facts["d_H"], 0.25, 0.25)


def test_proxy_estimate_is_flagged():
    a14 = gen.circle_sample(14).cloud
    proxy = gen.dense_circle_proxy(500, a14)
    sample = gen.proxy_sample_view(proxy)
    d = estimate_d(proxy, sample)
    assert d <= 2 * math.sin(math.pi / 28)
    params = validate_params(1.0, d, 0.5, 0.5, d_is_lower_bound=True)
    rep = recover_homology(sample, params)
    assert rep.betti_claim == [1, 1, 0]
    assert any("lower bound" in w for w in rep.warnings)


def test_report_json():
    fx = gen.circle_sample(10)
    rep = recover_homology(fx["A"], validate_params(1.0, 0.3129, 0.63, 0.37))
    obj = json.loads(rep.to_json())
    assert set(obj) == {"params", "betti_claim", "barcode", "warnings"}
    assert obj["params"]["tau"] == 1.0
    assert obj["betti_claim"] == [1, 1, 0]


# -- ambient cross-check ------------------------------------------------------------------


def test_nsw_constants():
    assert NSW_DENSITY == pytest.approx(0.3873, abs=1e-4)
    assert NSW_RADIUS == pytest.approx(0.7746, abs=1e-4)


def test_nsw_circle_a14():
    fx = gen.circle_sample(14)
    assert nsw_reconstruct_check(fx.cloud, 1.0, 2 * math.sin(math.pi / 28), 0.6) == [1, 1, 0]


def test_nsw_single_point_and_errors():
    one = EuclideanCloud(np.zeros((1, 2)))
    assert nsw_reconstruct_check(one, 1.0, 0.0, 0.5) == [1, 0, 0]
    with pytest.raises(DensityTooLow):
        nsw_reconstruct_check(one, 1.0, 0.5, 0.6)
    with pytest.raises(AlphaOutOfRange):
        nsw_reconstruct_check(one, 1.0, 0.1, 0.8)


@pytest.mark.parametrize("q", [14, 20, 30])
def test_cross_method_agreement_where_both_apply(q):
    fx = gen.circle_sample(q)
    d = fx.facts["d_H"]
    params = validate_params(1.0, d, *default_params(1.0, d), closed_alpha=True)
    for alpha in np.linspace(2 * d, NSW_RADIUS, 5)[1:-1]:
        assert nsw_reconstruct_check(fx.cloud, 1.0, d, float(alpha)) == recover_homology(fx["A"], params).betti_claim
