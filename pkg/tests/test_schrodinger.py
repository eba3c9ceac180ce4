import math

import numpy as np
import pytest

from bridgegauss import bridge_quad as bq
from bridgegauss import potentials as P
from bridgegauss import schrodinger as sch
from bridgegauss import feynman_kac as fk
from bridgegauss.kernel import BridgeSpec, DomainError, heat_kernel

from oracles import well_ratio_1d, well_ratio_3d

O1, O3 = np.zeros(1), np.zeros(3)


def well(d, v=0.5, R=1.0):
    return P.single(P.IndicatorBall(R), d, -v)


@pytest.fixture(scope="module")
def well1_est():
    return sch.g_series(well(1), BridgeSpec(1.0, O1, O1))


@pytest.fixture(scope="module")
def well3_est():
    return sch.g_series(well(3), BridgeSpec(1.0, O3, O3))


def test_zero_potential_exact():
    est = sch.g_series(P.constant(0.0, 1), BridgeSpec(0.7, [0.1], [0.4]))
    assert est.value == heat_kernel(0.7, [0.1], [0.4]) and est.truncation_bound == 0.0


@pytest.mark.parametrize("ct", [-1.0, -0.5, 0.25, 0.5])
def test_constant_potential_exponential(ct):
    t = 1.0
    est = sch.g_series(P.constant(ct / t, 1), BridgeSpec(t, [0.0], [0.3]))
    g = heat_kernel(t, [0.0], [0.3])
    assert abs(est.value - g * math.exp(ct)) <= est.truncation_bound
    assert est.eta < 1


def test_constant_terms_factorial():
    spec = BridgeSpec(1.0, [0.0], [0.0])
    V = P.constant(0.5, 1)
    g = heat_kernel(1.0, [0.0], [0.0])
    for n in range(6):
        assert sch.perturbation_term(n, V, spec) == pytest.approx(g * 0.5**n / math.factorial(n), rel=1e-6, abs=1e-12)


def test_first_term_is_minus_S(well1_est):
    spec = BridgeSpec(1.0, O1, O1)
    g = heat_kernel(1.0, O1, O1)
    S = bq.s_value(well(1), spec).value
    assert well1_est.terms[1] == pytest.approx(-g * S, rel=1e-6)
    assert sch.perturbation_term(0, well(1), spec) == g
    with pytest.raises(DomainError):
        sch.perturbation_term(-1, well(1), spec)


def test_well_1d_against_laplace_oracle(well1_est):
    ref = well_ratio_1d(0.5, 1.0)
    g = heat_kernel(1.0, O1, O1)
    assert abs(well1_est.ratio - ref) <= well1_est.truncation_bound / g


def test_well_3d_against_laplace_oracle(well3_est):
    ref = well_ratio_3d(0.5, 1.0)
    g = heat_kernel(1.0, O3, O3)
    assert abs(well3_est.ratio - ref) <= well3_est.truncation_bound / g


@pytest.mark.parametrize("v,t", [(-0.2, 1.0), (1.0, 0.5), (0.5, 2.0)])
def test_well_against_oracle_more(v, t):
    est = sch.g_series(well(1, v), BridgeSpec(t, O1, O1))
    g = heat_kernel(t, O1, O1)
    assert abs(est.ratio - well_ratio_1d(v, t)) <= est.truncation_bound / g + 1e-9


def test_truncation_bound_components(well1_est):
    e = well1_est
    assert e.truncation_bound == pytest.approx(e.tail_bound + e.discretization_error)
    assert 0 <= e.eta < 1 and e.n_max <= sch.DEFAULT_SERIES.n_cap


def test_tail_bound_majorizes_constant_series():
    c, t = 0.5, 1.0
    for h in (0.25, 1.0):
        eta = c * h
        for N in (2, 5, 10):
            true_tail = sum((c * t) ** n / math.factorial(n) for n in range(N + 1, 60))
            assert true_tail <= sch.tail_bound(eta, t, h, N)
            assert true_tail <= sch.tail_bound(eta, t, h, N, v_sup=c)
    assert sch.tail_bound(0.0, 1.0, 1.0, 3) == 0.0


def test_monotone_in_V():
    spec = BridgeSpec(1.0, O1, [0.5])
    a = sch.g_series(well(1, 0.5), spec)
    b = sch.g_series(well(1, 0.25), spec)
    c = sch.g_series(well(1, -0.2), spec)
    assert a.value <= b.value + a.truncation_bound + b.truncation_bound
    assert b.value <= c.value + b.truncation_bound + c.truncation_bound


def test_refuses_large_eta():
    with pytest.raises(DomainError):
        sch.g_series(well(1, 5.0), BridgeSpec(1.0, O1, O1), eta=1.2, h=1.0)


def test_radial_needs_endpoint_at_origin():
    with pytest.raises(NotImplementedError):
        sch.g_series(well(3), BridgeSpec(1.0, [0.2, 0, 0], [0.1, 0, 0]))
    # symmetric orientation: x != 0, y = 0 is swapped internally
    a = sch.g_series(well(3), BridgeSpec(0.5, [0.4, 0, 0], O3))
    b = sch.g_series(well(3), BridgeSpec(0.5, O3, [0.4, 0, 0]))
    assert a.value == pytest.approx(b.value, rel=1e-12)


def test_nfs2_factor_against_mc():
    y = [0.3, 0.0, 0.0]
    spec = BridgeSpec(1.0, O3, y)
    V = P.nfs2_factor(0.0)
    est = sch.g_series(V, spec)
    mc = fk.g_ratio_mc(V, spec, fk.McConfig(paths=20000, steps=1024, seed=3))
    assert est.truncation_bound / heat_kernel(1.0, O3, y) < 1e-4
    assert abs(est.ratio - mc.mean) <= 4 * mc.std_error


def test_duhamel_identity_1d():
    v, t, y = 0.3, 0.8, 0.4
    V = well(1, v)
    solver = sch.SeriesSolver(V, O1, t, [[y]])
    est = sch.g_series(V, BridgeSpec(t, O1, [y]), solver=solver)
    n = est.n_max
    g = heat_kernel(t, O1, [y])
    # G - g = int_0^t int G(s,0,z) V(z) g(t-s,z,y) dz ds
    #       = g * int_0^t E[ratio(s, Z_s) V(Z_s)] ds, Z_s the bridge marginal
    xs, ws = np.polynomial.legendre.leggauss(48)
    total = 0.0
    for si, wi in zip(0.5 * t * (xs + 1), 0.5 * t * ws):
        m, var = si * y / t, 2 * si * (t - si) / t
        sd = math.sqrt(var)
        a, b = max(-1.0, m - 9 * sd), min(1.0, m + 9 * sd)
        if a >= b:
            continue
        inner = 0.0
        for zj, wj in zip(0.5 * (b - a) * (xs + 1) + a, 0.5 * (b - a) * ws):
            dens = math.exp(-((zj - m) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
            inner += wj * dens * float(np.sum(solver.ratios(si, [zj], n - 1)))
        total += wi * (-v) * inner
    assert est.value - g == pytest.approx(g * total, abs=2 * est.truncation_bound + 1e-7)


def test_envelope_negative_potential(well3_est):
    spec = BridgeSpec(1.0, O3, O3)
    rep = sch.envelope_check(well(3), spec, h=1.0)
    assert rep.upper == 1.0 and rep.eta == 0.0
    S = bq.s_value(well(3), spec).value
    assert rep.lower == pytest.approx(math.exp(-S))
    assert rep.passed and rep.lower <= rep.ratio <= 1.0


def test_envelope_positive_potential():
    V = P.single(P.IndicatorBall(1.0), 1, 0.2)
    rep = sch.envelope_check(V, BridgeSpec(1.0, O1, [0.3]))
    assert rep.lower == 1.0 and rep.passed
    assert 1.0 <= rep.ratio <= rep.upper


def test_envelope_hypothesis_failure_is_indeterminate():
    rep = sch.envelope_check(well(1, -1.0), BridgeSpec(1.0, O1, O1), eta_pos=1.5, ratio=(1.0, 0.0, "given"))
    assert rep.passed is None and "hypothesis_failed" in rep.flags


def test_geometric_bound_eq2():
    V = P.single(P.IndicatorBall(1.0), 1, 0.2)
    h = 0.5
    cond = sch.condition1_check(V, h)
    assert cond.passed
    for t in (0.5, 1.0):
        est = sch.g_series(V, BridgeSpec(t, O1, O1))
        Q = t * cond.eta / h
        bound = (1 / (1 - cond.eta)) ** (1 + Q / cond.eta) * heat_kernel(t, O1, O1)
        assert est.value <= bound + 1e-9


def test_lower_exp_constants_constant():
    T = 1.3
    le = sch.lower_exp_constants(P.constant(-1.0, 2), T)
    assert le.C == pytest.approx(math.exp(-T), rel=1e-10) and le.c == pytest.approx(1.0, rel=1e-10)
    le2 = sch.lower_exp_constants(P.constant(-2.0, 2), T)
    assert -math.log(le2.C) == pytest.approx(-2 * math.log(le.C), rel=1e-10)
    assert le2.c == pytest.approx(2 * le.c, rel=1e-10)
    z = sch.lower_exp_constants(P.constant(0.0, 2), T)
    assert z.C == 1.0 and z.c == 0.0


def test_lower_exp_constants_refusals():
    with pytest.raises(DomainError):
        sch.lower_exp_constants(P.constant(1.0, 1), 1.0)
    with pytest.raises(DomainError):
        sch.lower_exp_constants(P.nfs2(0.0), 1.0, grid=bq.origin_grid(6))


def test_lower_exp_spot_checks():
    V = well(3, 1.0)
    pts = [(t, O3, [r, 0, 0]) for t in (0.3, 1.0) for r in (0.0, 0.8)]
    le = sch.lower_exp_constants(V, 1.0, check_points=pts)
    assert le.violations == 0 and len(le.checks) == 4


def test_condition1_constant_and_zero():
    c = 0.4
    rep = sch.condition1_check(P.constant(c, 1), 0.5)
    for tau, p1, rhs in rep.table:
        assert p1 == pytest.approx(c * tau, rel=1e-9)
        assert rhs == pytest.approx(c * 0.5 + c * tau, rel=1e-9)
    assert rep.passed
    assert sch.condition1_check(P.constant(0.0, 1), 0.5).passed


def test_batch_matches_single():
    V = well(1)
    specs = [BridgeSpec(t, O1, [y]) for t in (0.5, 1.0) for y in (0.0, 0.7)]
    batch = sch.g_series_batch(V, specs)
    single = sch.g_series(V, specs[-1])
    assert batch[-1].value == pytest.approx(single.value, abs=batch[-1].truncation_bound + single.truncation_bound)
