import numpy as np
import pytest
import scipy.linalg

from groundstate.model import MarkovModel, jordan_model, two_state_model
from groundstate.semigroup import kernel
from groundstate.spectral import (DegenerateSpectrum, eigen_equilibrium, lambda0_growth,
                                  principal)

from factories import random_irreducible, random_sparse

GOLDEN = (1 + 5 ** 0.5) / 2 - 1


def test_jordan_is_degenerate():
    sr = principal(jordan_model())
    assert sr.lambda0 == pytest.approx(0.0, abs=1e-12)
    assert sr.degenerate
    assert (sr.algebraic_multiplicity, sr.geometric_multiplicity) == (2, 1)
    assert np.allclose(sr.psi, [0, 1])
    assert np.allclose(sr.phi.weights, [1, 0])
    with pytest.raises(DegenerateSpectrum):
        eigen_equilibrium(jordan_model())


def test_two_state_closed_form():
    sr = principal(two_state_model())
    assert sr.lambda0 == pytest.approx(GOLDEN, abs=1e-14)
    mu = eigen_equilibrium(two_state_model())
    assert mu.weights == pytest.approx([0.276393202250021, 0.723606797749979], abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_irreducible_perron_data(seed):
    rng = np.random.default_rng(seed)
    m = random_irreducible(rng)
    sr = principal(m)
    assert not sr.degenerate
    assert m.V.min() - 1e-10 <= sr.lambda0 <= m.V.max() + 1e-10
    assert np.all(sr.psi > 0) and np.all(sr.phi.weights > 0)
    assert max(sr.residuals) < 1e-10
    assert sr.psi.max() == pytest.approx(1.0)
    # spectral radius of the kernel is exp(t lambda0)
    rho = np.max(np.abs(scipy.linalg.eigvals(kernel(m, 0.5).entries)))
    assert rho == pytest.approx(np.exp(0.5 * sr.lambda0), rel=1e-10)


def test_reducible_models_still_return_nonnegative_vectors():
    rng = np.random.default_rng(7)
    for _ in range(30):
        sr = principal(random_sparse(rng, density=0.3))
        assert np.all(sr.psi >= -1e-12)
        assert np.all(sr.phi.weights >= 0)


def test_multi_dimensional_eigenspace():
    # two disconnected copies with equal potential: eigenspace of dimension 2
    L = np.zeros((4, 4))
    L[0, 1], L[1, 0], L[2, 3], L[3, 2] = 1, 2, 1, 2
    np.fill_diagonal(L, -L.sum(axis=1))
    sr = principal(MarkovModel(4, L, np.zeros(4)))
    assert sr.lambda0 == pytest.approx(0.0, abs=1e-12)
    assert sr.geometric_multiplicity == 2 and not sr.degenerate
    assert np.all(sr.psi >= -1e-12)


def test_lambda0_growth_agrees():
    rng = np.random.default_rng(8)
    for _ in range(5):
        m = random_irreducible(rng)
        assert lambda0_growth(m) == pytest.approx(principal(m).lambda0, abs=1e-3)
    assert lambda0_growth(jordan_model(), t_max=400) == pytest.approx(0.0, abs=1e-2)
