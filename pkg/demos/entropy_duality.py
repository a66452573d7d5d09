"""Relative entropy as a supremum over test functions and as an integral of a density."""

import math

import numpy as np

from groundstate import entropy_density, entropy_dual

rng = np.random.default_rng(5)
for _ in range(4):
    mu, pi = rng.dirichlet(np.ones(4)), rng.dirichlet(np.ones(4))
    d, e = entropy_dual(mu, pi), entropy_density(mu, pi)
    print(f"dual {d.value:.12f}  density {e.value:.12f}")

print("H(delta_0, uniform) - log 2 =", entropy_dual([1, 0], [0.5, 0.5]).value - math.log(2))
res = entropy_dual([0.5, 0.5], [1.0, 0.0])
print("mu not absolutely continuous: finite =", res.finite)
