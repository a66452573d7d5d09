import numpy as np
import pytest

from groundstate.entropy import entropy_density
from groundstate.htransform import (ZeroDensityOnSupport, check_equilibrium,
                                    check_ground_measure, check_ground_state,
                                    contraction_check, h_kernel, verify_triple)
from groundstate.model import AbsoluteContinuityViolation, jordan_model, two_state_model
from groundstate.spectral import eigen_equilibrium, principal

from factories import random_irreducible, random_measure


def perron_triple(m):
    sr = principal(m)
    pi = sr.phi.weights
    mu = eigen_equilibrium(m, sr).weights
    return sr, pi, mu


def test_two_state_triple():
    m = two_state_model()
    sr, pi, mu = perron_triple(m)
    rep = verify_triple(m, pi, mu)
    assert rep.is_ground_measure and rep.is_ground_state and rep.is_equilibrium
    assert rep.implications_verified
    assert all(imp.status == "pass" for imp in rep.implications)
    assert rep.entropy_finite
    assert rep.q_invariance_residual < 1e-10 and rep.markov_defect < 1e-10


def test_jordan_ground_measure_unique_on_grid():
    m = jordan_model()
    passing = [p for p in np.linspace(0, 1, 101)
               if check_ground_measure(m, [p, 1 - p], 0.0).passed]
    assert passing == [1.0]


def test_jordan_ground_state_on_absorbing_support():
    # psi = (1, anything) is a ground state relative to the point mass at 0
    m = jordan_model()
    assert check_ground_state(m, [1.0, 5.0], [1.0, 0.0], 0.0)
    assert not check_ground_state(m, [1.0, 5.0], [0.5, 0.5], 0.0)


def test_h_kernel_is_markov_and_preserves_mu():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = random_irreducible(rng)
        sr, pi, mu = perron_triple(m)
        K = h_kernel(m, sr.psi, sr.lambda0, 0.8).entries
        assert np.all(K >= 0)
        assert np.allclose(K.sum(axis=1), 1.0, atol=1e-10)
        assert np.allclose(mu @ K, mu, atol=1e-10)


def test_h_kernel_rejects_zero_psi_on_support():
    m = two_state_model()
    with pytest.raises(ZeroDensityOnSupport):
        h_kernel(m, [1.0, 0.0], None, 1.0)
    # zero off the support of mu is allowed
    h_kernel(m, [1.0, 0.0], None, 1.0, mu=[1.0, 0.0])


def test_absolute_continuity_violation():
    m = two_state_model()
    with pytest.raises(AbsoluteContinuityViolation):
        verify_triple(m, [1.0, 0.0], [0.5, 0.5])


def test_perturbed_pi_fails_ground_measure():
    rng = np.random.default_rng(1)
    m = random_irreducible(rng, n=4)
    sr, pi, mu = perron_triple(m)
    pi2 = pi.copy()
    pi2[0] *= 1.1
    pi2 /= pi2.sum()
    rep = verify_triple(m, pi2, mu)
    assert not rep.is_ground_measure
    assert rep.is_equilibrium
    assert not rep.is_ground_state
    assert rep.implications_verified


def test_ground_measure_transports_equilibrium_entropy():
    # entropy of the h-transform evolved measure never increases toward mu
    rng = np.random.default_rng(2)
    m = random_irreducible(rng, n=5)
    sr, pi, mu = perron_triple(m)
    nu = random_measure(rng, 5)
    K = h_kernel(m, sr.psi, sr.lambda0, 1.0).entries
    assert entropy_density(nu @ K, mu).value <= entropy_density(nu, mu).value + 1e-12


def test_contraction_on_ground_measure():
    rng = np.random.default_rng(3)
    for _ in range(20):
        m = random_irreducible(rng)
        sr, pi, _ = perron_triple(m)
        f = rng.normal(size=m.n)
        assert contraction_check(m, pi, sr.lambda0, float(rng.uniform(0, 4)), f)


def test_check_equilibrium_rejects_other_measures():
    m = two_state_model()
    assert not check_equilibrium(m, [0.5, 0.5])
    assert check_equilibrium(m, eigen_equilibrium(m).weights)
