import math

import pytest

import gwlife

GEOMETRIC = {
    "offspring": {"kind": "point", "j": 2},
    "lifetime": {"kind": "geometric", "mean": 1},
}


@pytest.fixture
def geometric():
    return gwlife.load_model(GEOMETRIC)


def test_convergence_norm(geometric):
    rep = gwlife.convergence_radius(geometric)
    assert rep["radius_case"] == "Supercritical"
    assert abs(rep["rho"] - 1.5) < 1e-10
    assert rep["R"] == {"finite": 2.0}


def test_growth_and_extinction(geometric):
    assert abs(gwlife.growth_constant(geometric) - 1.0) < 1e-10
    ext = gwlife.extinction_probability(geometric)
    assert abs(ext["q"] - (math.sqrt(5) - 1) / 2) < 1e-10
    assert not ext["certain"]


def test_truncation(geometric):
    seq = gwlife.radius_sequence(geometric, 20)
    assert len(seq) == 20
    assert all(b >= a for a, b in zip(seq, seq[1:]))
    power = gwlife.truncated_radius(geometric, 20, "power_iteration")
    assert abs(power - seq[-1]) < 1e-9
    assert abs(gwlife.mean_total(geometric, 10) - 1.5**10) < 1e-8


def test_transient_model_has_no_invariant_system():
    model = gwlife.load_model(
        {
            "offspring": {"kind": "poisson", "mean": 0.3},
            "lifetime": {"kind": "power_tilt", "a": 0.5, "b": 3},
        }
    )
    assert gwlife.classify(model)["kind"] == "Transient"
    with pytest.raises(gwlife.DomainError):
        gwlife.invariant_system(model, 50)


def test_simulation_is_seeded(geometric):
    a = gwlife.simulate(geometric, replicates=500, horizon=50, seed=3, generations=[5])
    b = gwlife.simulate(geometric, replicates=500, horizon=50, seed=3, generations=[5])
    assert a == b
    assert 0.0 <= a["extinction_frequency"] <= 1.0
    assert a["growth"][0]["generation"] == 5


def test_bad_spec():
    with pytest.raises(ValueError):
        gwlife.load_model({"offspring": {"kind": "binomial"}, "lifetime": {"kind": "geometric", "mean": 1}})
