"""The principal eigenvalue two ways: spectral abscissa and variational supremum.

For random irreducible chains the maximizer of mu(V) - I(mu) is the product
of the left and right Perron vectors.
"""

import numpy as np

from groundstate import MarkovModel, dv_supremum, eigen_equilibrium, principal, rate_I

rng = np.random.default_rng(11)
for n in (2, 4, 6):
    R = rng.uniform(0.1, 3.0, size=(n, n))
    np.fill_diagonal(R, 0.0)
    L = R - np.diag(R.sum(axis=1))
    model = MarkovModel(n, L, rng.uniform(-1, 1, size=n))
    sr = principal(model)
    dv = dv_supremum(model)
    mu = eigen_equilibrium(model, sr)
    print(f"n = {n}: spectral {sr.lambda0:.12f}, variational {dv.lambda0:.12f}, "
          f"gap certificate {dv.duality_gap:.1e}")
    print(f"  |maximizer - phi*psi|_1 = {np.abs(dv.maximizer_mu.weights - mu.weights).sum():.2e}")
    print(f"  mu(V) - I(mu) at phi*psi = {mu.weights @ model.V - rate_I(model, mu).value:.12f}")
