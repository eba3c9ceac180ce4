import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from bridgegauss.kernel import (BlockSplit, BridgeSpec, DomainError, bridge_density, bridge_density_bound,
                                bridge_moments, factorized_bridge_density, heat_kernel, log_heat_kernel)

coord = st.floats(-3, 3)
times = st.floats(0.05, 5)


def test_heat_kernel_unit_value():
    assert heat_kernel(1 / (4 * math.pi), [0.3], [0.3]) == pytest.approx(1.0, rel=1e-15)


def test_heat_kernel_d3_distance_two():
    assert heat_kernel(1.0, [0, 0, 0], [2, 0, 0]) == pytest.approx((4 * math.pi) ** -1.5 * math.exp(-1), rel=1e-14)


def test_heat_kernel_underflow_safe_in_log():
    assert log_heat_kernel(1e-3, [0.0], [100.0]) == pytest.approx(-0.5 * math.log(4e-3 * math.pi) - 1e4 / 4e-3)


@pytest.mark.parametrize("t,x,y", [(0.0, [0], [0]), (-1.0, [0], [0]), (1.0, [0, 0], [0])])
def test_heat_kernel_domain_errors(t, x, y):
    with pytest.raises(DomainError):
        heat_kernel(t, x, y)


@given(times, st.lists(coord, min_size=2, max_size=2), st.lists(coord, min_size=2, max_size=2))
def test_heat_kernel_symmetric(t, x, y):
    assert heat_kernel(t, x, y) == heat_kernel(t, y, x)


def test_bridge_moments_example():
    mean, var = bridge_moments(0.25, BridgeSpec(1.0, [0.0], [1.0]))
    assert mean[0] == pytest.approx(0.25)
    assert var == pytest.approx(0.375)


def test_bridge_moments_against_quadrature():
    spec = BridgeSpec(1.0, [0.0], [1.0])
    s = 0.25
    m1 = integrate.quad(lambda z: z * bridge_density(s, spec, [z]), -10, 10)[0]
    m2 = integrate.quad(lambda z: (z - m1) ** 2 * bridge_density(s, spec, [z]), -10, 10)[0]
    assert m1 == pytest.approx(0.25, abs=1e-10)
    assert m2 == pytest.approx(0.375, abs=1e-10)


def test_bridge_midpoint_mean_and_endpoint_variance():
    spec = BridgeSpec(2.0, [1.5, -1], [1.5, -1])
    assert np.allclose(bridge_moments(1.0, spec)[0], spec.x)
    assert bridge_moments(1e-12, spec)[1] < 1e-11


@pytest.mark.parametrize("s", [0.0, 1.0, 1.5, -0.1])
def test_bridge_density_rejects_s_outside(s):
    with pytest.raises(DomainError):
        bridge_density(s, BridgeSpec(1.0, [0], [0]), [0])


@pytest.mark.parametrize("d", [1, 2, 3])
@given(s=st.floats(0.02, 0.98), t=times, data=st.data())
def test_chapman_kolmogorov_normalisation(d, s, t, data):
    x = np.array(data.draw(st.lists(coord, min_size=d, max_size=d)))
    y = np.array(data.draw(st.lists(coord, min_size=d, max_size=d)))
    spec = BridgeSpec(t, x, y)
    mean, var = bridge_moments(s * t, spec)
    # product of 1-D marginal integrals, each over mean +- 10 sd
    sd = math.sqrt(var)
    total = 1.0
    for k in range(d):
        def f(z, k=k):
            zz = mean.copy()
            zz[k] = z
            others = np.delete(mean - zz, k)
            return bridge_density(s * t, spec, zz) / (4 * math.pi * s * t * (t - s * t) / t) ** (-(d - 1) / 2)
        total *= integrate.quad(f, mean[k] - 10 * sd, mean[k] + 10 * sd, epsabs=0, epsrel=1e-10)[0]
    assert total == pytest.approx(1.0, rel=1e-6)


@given(s=st.floats(0.01, 0.99), t=times, x=coord, y=coord)
def test_chapman_kolmogorov_d1(s, t, x, y):
    u = s * t
    mean = ((t - u) * x + u * y) / t
    sd = math.sqrt(2 * u * (t - u) / t)
    val = integrate.quad(lambda z: heat_kernel(u, [x], [z]) * heat_kernel(t - u, [z], [y]),
                         mean - 10 * sd, mean + 10 * sd, epsabs=0, epsrel=1e-10)[0]
    assert val == pytest.approx(heat_kernel(t, [x], [y]), rel=1e-6)


@given(s=st.floats(0.01, 0.99), t=times, data=st.data())
def test_pointwise_bound_exact(s, t, data):
    d = data.draw(st.integers(1, 3))
    pts = [np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) for _ in range(3)]
    spec = BridgeSpec(t, pts[0], pts[1])
    assert bridge_density(s * t, spec, pts[2]) <= bridge_density_bound(s * t, t, d)


@given(s=st.floats(0.01, 0.99), t=times, data=st.data())
def test_bridge_reversal_symmetry(s, t, data):
    d = data.draw(st.integers(1, 3))
    x, y, z = (np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) for _ in range(3))
    a = bridge_density(s * t, BridgeSpec(t, x, y), z)
    b = bridge_density(t - s * t, BridgeSpec(t, y, x), z)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@given(s=st.floats(0.01, 0.99), t=times, data=st.data())
def test_factorized_density_matches(s, t, data):
    d1, d2 = data.draw(st.integers(1, 2)), data.draw(st.integers(1, 2))
    d = d1 + d2
    x, y, z = (np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) for _ in range(3))
    spec = BridgeSpec(t, x, y)
    direct = bridge_density(s * t, spec, z)
    fact = factorized_bridge_density(s * t, spec, BlockSplit(d1, d2), z)
    assert fact == pytest.approx(direct, rel=1e-12, abs=1e-300)


def test_factorized_block_swap():
    spec = BridgeSpec(1.0, [0.1, 0.2, -0.3, 0.4], [0.5, 0.0, 0.2, -0.1])
    z = np.array([0.3, -0.2, 0.1, 0.0])
    sw = BridgeSpec(1.0, np.roll(spec.x, 2), np.roll(spec.y, 2))
    split = BlockSplit(2, 2)
    assert factorized_bridge_density(0.4, spec, split, z) == pytest.approx(
        factorized_bridge_density(0.4, sw, split, np.roll(z, 2)), rel=1e-14)


def test_factorized_rejects_bad_split():
    with pytest.raises(DomainError):
        factorized_bridge_density(0.5, BridgeSpec(1.0, [0, 0], [0, 0]), BlockSplit(2, 1), [0, 0])


def test_bridge_spec_validation():
    with pytest.raises(DomainError):
        BridgeSpec(0.0, [0], [0])
    with pytest.raises(DomainError):
        BridgeSpec(1.0, [0, 0], [0])
    with pytest.raises(DomainError):
        BridgeSpec(1.0, [math.nan], [0])


@given(s=st.floats(0.01, 0.99), t=times, data=st.data())
def test_gaussian_form_matches_heat_kernel_ratio(s, t, data):
    from bridgegauss.kernel import log_bridge_density
    d = data.draw(st.integers(1, 3))
    x, y, z = (np.array(data.draw(st.lists(coord, min_size=d, max_size=d))) for _ in range(3))
    spec = BridgeSpec(t, x, y)
    assert math.log(bridge_density(s * t, spec, z)) == pytest.approx(log_bridge_density(s * t, spec, z),
                                                                     rel=1e-9, abs=1e-9)
