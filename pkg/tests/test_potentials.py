import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from bridgegauss import potentials as P
from bridgegauss.kernel import DomainError


def test_ld2_values():
    V = P.ld2(2.0, 3)
    assert V.eval([0.25, 0.3, 0.0]) == pytest.approx(-2.0)
    assert V.eval([1 / 9, 0.0, 0.0]) == pytest.approx(-3.0)
    assert V.eval([0.25, 1.5, 0.0]) == 0.0
    assert V.eval([0.0, 0.0, 0.0]) == -math.inf


def test_czwarty_values():
    V = P.czwarty(3)
    assert V.eval([0.0, 0.0, 0.0]) == -1.0
    assert V.eval([3.0, 0.0, 0.0]) == pytest.approx(-1 / 64)
    V5 = P.czwarty(5)
    assert V5.eval([7.0, -2.0, 0.0, 0.0, 0.0]) == -1.0  # inert first block


def test_nfs2_factor_profile():
    f = P.nfs2_factor(0.0)
    assert f.eval([0.5, 0, 0]) == pytest.approx(-1.0)
    assert f.eval([1.5, 0, 0]) == 0.0
    V = P.nfs2(0.0)
    assert V.dim == 6
    assert V.eval([0.5, 0, 0, 0.25, 0, 0]) == pytest.approx(0.5 * 0.5 * 2.0 * 4.0)


def test_eval_outside_support_is_zero():
    for V in (P.ld2(), P.nfs2_factor(0.3), P.drugi_component(3)):
        assert V.eval(np.full(V.dim, 5.0)) == 0.0


def test_eval_dimension_mismatch():
    with pytest.raises(DomainError):
        P.ld2().eval([0.0, 0.0])


@pytest.mark.parametrize("kwargs", [dict(p=1.0), dict(p=math.inf), dict(d=2)])
def test_ld2_range_errors(kwargs):
    with pytest.raises(DomainError):
        P.ld2(**{"p": 2.0, "d": 3, **kwargs})


def test_nfs2_epsilon_range():
    with pytest.raises(DomainError):
        P.nfs2_factor(1.0)
    with pytest.raises(DomainError):
        P.nfs2_factor(-0.1)


def test_lp_norm_power_indicator_p1():
    # int_{-1}^{1} |u|^(-1/2) du = 4
    assert P.lp_norm(P.PowerIndicator(0.5, 1.0), 1, 1) == pytest.approx(4.0, rel=1e-14)
    assert P.lp_norm(P.PowerIndicator(0.5, 1.0), 1, 1) == pytest.approx(integrate.quad(lambda u: abs(u) ** -0.5,
                                                                                       -1, 1, points=[0])[0])


def test_lp_norm_indicator_volume_and_divergence():
    assert P.lp_norm(P.IndicatorBall(1.0), 2, 3) == pytest.approx(math.sqrt(4 * math.pi / 3), rel=1e-14)
    assert P.lp_norm(P.PowerIndicator(0.5, 1.0), 2, 1) == math.inf
    with pytest.raises(DomainError):
        P.lp_norm(P.IndicatorBall(), 0.5, 1)


@pytest.mark.parametrize("m,expo,shift,p", [(3, 3.0, 1.0, 1.5), (3, 2.0, 0.5, 2.0), (1, 1.0, 2.0, 2.0), (2, 3.0, 1.0, 1.0)])
def test_smooth_decay_norm_against_radial_quadrature(m, expo, shift, p):
    prof = P.SmoothDecay(expo, shift)
    radial = integrate.quad(lambda r: r ** (m - 1) * (r + shift) ** (-expo * p), 0, np.inf, epsrel=1e-12)[0]
    assert prof.lp_norm(p, m) == pytest.approx((P.sphere_area(m) * radial) ** (1 / p), rel=1e-10)


def test_smooth_decay_norm_divergent():
    assert P.SmoothDecay(3.0, 1.0).lp_norm(1.0, 3) == math.inf


def test_lp_multiplicativity_against_2d_quadrature():
    term = P.Term(-2.0, (P.Factor(P.PowerIndicator(0.25, 1.0), 1), P.Factor(P.SmoothDecay(2.0, 1.0), 1)))
    V = P.Potential(2, (term,))
    p = 2.0
    f = lambda u2, u1: abs(V.eval([u1, u2])) ** p
    inner = lambda u1: integrate.quad(lambda u2: f(u2, u1), -np.inf, np.inf, epsrel=1e-12)[0]
    val = 2 * integrate.quad(inner, 0, 1, epsrel=1e-11, limit=200)[0]
    assert V.lp_norm_bound(p) == pytest.approx(val ** (1 / p), rel=1e-6)


def test_ld2_norms_finite_below_p_only():
    prof = P.ld2(2.0).terms[0].factors[0].profile
    for q in (1.0, 1.5, 1.99):
        assert math.isfinite(prof.lp_norm(q, 1))
    for q in (2.0, 3.0, math.inf):
        assert prof.lp_norm(q, 1) == math.inf


point3 = st.lists(st.floats(-2, 2), min_size=3, max_size=3)


def _mixed():
    return P.Potential(3, (P.Term(-1.0, (P.Factor(P.IndicatorBall(1.0), 3),)),
                           P.Term(0.7, (P.Factor(P.SmoothDecay(2.0, 1.0), 3),))))


@given(point3)
def test_positive_negative_parts_decompose(x):
    for V in (_mixed(), P.ld2(), P.czwarty()):
        v, pos, neg = V.eval(x), V.positive_part().eval(x), V.negative_part().eval(x)
        if math.isfinite(v):
            assert v == pos - neg
        assert pos == 0 or neg == 0


def test_scale_shift():
    z = P.scale_shift(P.ld2(), 0.0)
    assert z.eval([0.1, 0.1, 0.1]) == 0.0
    V = P.czwarty()
    W = P.scale_shift(V, 1.0)
    for x in ([0, 0, 0], [0.3, 1.0, -2.0]):
        assert W.eval(x) == -V.eval(x)


def test_sign_structure():
    assert P.ld2().sign() == -1
    assert not _mixed().is_single_signed()
    with pytest.raises(DomainError):
        _mixed().abs_terms()
    assert P.constant(0.0, 2).terms == ()


def test_json_roundtrip():
    for V in (P.ld2(), P.czwarty(5), P.nfs2(0.2), _mixed()):
        W = P.potential_from_json(json.loads(json.dumps(V.to_json())))
        assert W.dim == V.dim and W.terms == V.terms


def test_json_examples_and_errors():
    assert P.potential_from_json({"example": "nfs2", "epsilon": 0.0}).dim == 6
    assert P.potential_from_json({"example": "nfs2", "factor": True}).dim == 3
    with pytest.raises(DomainError):
        P.potential_from_json({"dim": 1, "terms": [{"coeff": 1}]})
    with pytest.raises(DomainError):
        P.potential_from_json({"dim": 1, "terms": [{"coeff": 1, "factors": [{"dim": 1, "profile": {"type": "x"}}]}]})
    with pytest.raises(DomainError):
        P.paper_example("unknown")


def test_drugi_weights_and_metadata():
    a = {n: float(n) for n in range(2, 5)}
    V = P.drugi(4, 3, sup_estimates=a)
    assert [t.coeff for t in V.terms] == pytest.approx([-1 / (n**3) for n in range(2, 5)])
    assert V.meta["a_n_are"] == "grid lower estimates"


def test_drugi_lp_lower_bounds_grow():
    V = P.drugi(4, 3, sup_estimates={n: 1.0 for n in range(2, 5)})
    lows = [P.drugi_lp_lower_bound(V, 1.5, d) for d in (1e-2, 1e-4, 1e-8, 1e-16)]
    assert all(b > a for a, b in zip(lows, lows[1:]))
    # the n = 4 term alone behaves like u^(-9/8), whose integral grows like delta^(-1/8)
    assert lows[-1] > 4 * lows[0]


def test_drugi_below_threshold_converges():
    # with terms n <= 2 and p = 1.5 the exponent (1/2) * 1.5 < 1, so the bound stays finite
    V = P.drugi(2, 3, sup_estimates={2: 1.0})
    lows = [P.drugi_lp_lower_bound(V, 1.5, d) for d in (1e-4, 1e-8, 1e-12)]
    # limit: 2 * (1/4)^1.5 * int_0^1 u^(-3/4) du * |B_2| = pi, approached like delta^(1/4)
    assert lows[0] < lows[1] < lows[2] < math.pi
    assert math.pi - lows[-1] < 1e-2
