import math

import numpy as np
import pytest

from groundstate.entropy import entropy_density, entropy_dual

from factories import random_measure


def test_point_mass_against_uniform():
    for res in (entropy_dual([1, 0], [0.5, 0.5]), entropy_density([1, 0], [0.5, 0.5])):
        assert res.value == pytest.approx(math.log(2), abs=1e-9)


def test_identical_measures_have_zero_entropy():
    w = np.array([0.2, 0.3, 0.5])
    assert entropy_dual(w, w).value == pytest.approx(0.0, abs=1e-12)
    assert entropy_density(w, w).value == pytest.approx(0.0, abs=1e-15)


def test_dual_matches_density():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 8))
        pi = rng.dirichlet(np.full(n, 0.5))
        mu = random_measure(rng, n, zeros=int(rng.integers(0, n)))
        d = entropy_dual(mu, pi)
        assert d.converged
        assert d.value == pytest.approx(entropy_density(mu, pi).value, abs=1e-7)


def test_infinite_flag_on_absolute_continuity_failure():
    for res in (entropy_dual([0.5, 0.5], [1.0, 0.0]), entropy_density([0.5, 0.5], [1.0, 0.0])):
        assert not res.finite and res.value is None
        with pytest.raises(ValueError):
            float(res)


def test_dual_maximizer_is_log_density():
    mu = np.array([0.1, 0.6, 0.3])
    pi = np.array([0.3, 0.3, 0.4])
    f = entropy_dual(mu, pi).maximizer_f
    ref = np.log(mu / pi)
    assert np.allclose(f - f[0], ref - ref[0], atol=1e-8)


def test_pi_null_states_do_not_matter():
    mu = np.array([0.4, 0.6, 0.0])
    a = entropy_dual(mu, [0.5, 0.5, 0.0]).value
    b = entropy_density(mu, [0.5, 0.5, 0.0]).value
    assert a == pytest.approx(b, abs=1e-10)


def test_gibbs_inequality():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        assert entropy_density(rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))).value >= 0


def test_golden_chain_equilibrium_against_uniform():
    # direct scalar evaluation: 0.2764 log(0.5528) + 0.7236 log(1.4472)
    mu = [0.2764, 0.7236]
    ref = 0.2764 * math.log(0.5528) + 0.7236 * math.log(1.4472)
    assert entropy_dual(mu, [0.5, 0.5]).value == pytest.approx(ref, abs=1e-12)
    assert ref == pytest.approx(0.10363, abs=1e-5)
