import numpy as np
import pytest

from ecoepi.aux_orbits import disease_free_orbits, return_residual, s0, shoot_aux, y0
from ecoepi.errors import NonContractive
from ecoepi.integrate import dopri5
from ecoepi.periodic import Constant

from conftest import benchmark_params, constant_params

P045 = benchmark_params(0.45)
P060 = benchmark_params(0.6)


def test_constant_degeneration():
    p = constant_params(Lambda=1.3, mu=0.7, r=0.45, b=0.2)
    s, y = s0(p), y0(p)
    assert abs(s.initial - 1.3 / 0.7) < 1e-10
    assert abs(y.initial - 0.45 / 0.2) < 1e-10
    np.testing.assert_allclose(s.values, 1.3 / 0.7, atol=1e-10)
    np.testing.assert_allclose(y.values, 0.45 / 0.2, atol=1e-10)


def test_benchmark_initial_values():
    # printed to three decimals: s0(0) = 1.152, y0(0) = 0.669
    assert abs(s0(P045).initial - 1.152) <= 0.005
    assert abs(y0(P045).initial - 0.669) <= 0.005
    # frozen regression values from this implementation
    assert s0(P045).initial == pytest.approx(1.1519753, abs=1e-6)
    assert y0(P045).initial == pytest.approx(0.6674469, abs=1e-6)


@pytest.mark.parametrize("params", [P045, P060], ids=["g045", "g060"])
def test_periodicity_residuals(params):
    s, y = s0(params), y0(params)
    assert s.residual < 1e-9 and y.residual < 1e-9
    assert np.all(s.values > 0) and np.all(y.values > 0)
    assert abs(s.values[-1] - s.values[0]) < 1e-9
    assert abs(y.values[-1] - y.values[0]) < 1e-9
    # closed form and the independent fixed-point solve
    assert abs(s.initial - s.fixed_point_check) < 1e-10
    assert abs(y.initial - y.fixed_point_check) < 1e-10


def test_samples_follow_the_ode():
    s = s0(P060)
    out, _ = dopri5(lambda t, x: P060.Lambda(t) - P060.mu(t) * x, 0.0, np.array([s.initial]), 1.0,
                    s.t, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(out[:, 0], s.values, atol=1e-9)


def test_uniqueness_from_random_starts():
    rng = np.random.default_rng(3)
    s_ref, y_ref = s0(P045).initial, y0(P045).initial
    for start in rng.uniform(0.01, 5.0, 20):
        assert abs(shoot_aux("s", P045, start) - s_ref) < 1e-8
        assert abs(shoot_aux("y", P045, start) - y_ref) < 1e-8


def test_assembled_orbits():
    o1, o2 = disease_free_orbits(P045)
    assert o1.initial[1] == 0 and o1.initial[2] == 0 and o2.initial[1] == 0
    assert return_residual(P045, o1) < 1e-8
    assert return_residual(P045, o2) < 1e-8
    assert np.all(np.abs(o2.multipliers) < 1)
    _, o2b = disease_free_orbits(P060)
    assert abs(o2b.infected_multiplier) > 1
    t, x = o2.samples(50)
    assert x.shape == (51, 3) and np.all(x[:, 1] == 0)


def test_noncontractive():
    with pytest.raises(NonContractive):
        y0(P045.replace(r=Constant(-0.1)))
    with pytest.raises(NonContractive):
        s0(P045.replace(mu=Constant(0.0)))
