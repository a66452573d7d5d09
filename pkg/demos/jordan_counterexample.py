"""A two-state chain whose Schrodinger semigroup grows like 1 + t.

State 0 is absorbing and state 1 jumps to it at rate 1; with V = (0, 1) the
matrix L + diag(V) is a Jordan block with eigenvalue 0.  Every measure on the
two states attains the variational supremum, yet only the point mass at the
absorbing state is a ground measure, and the time-averaging construction has
nothing to converge to.
"""

import numpy as np

from groundstate import (HypothesisViolated, check_ground_measure, construct_ground_measure,
                         growth_constant, jordan_model, normalized_kernel, principal, rate_IV)

model = jordan_model()
sr = principal(model)
print(f"lambda0 = {sr.lambda0:g}, degenerate = {sr.degenerate}, "
      f"multiplicities (alg, geo) = ({sr.algebraic_multiplicity}, {sr.geometric_multiplicity})")

# every (p, 1-p) is an equilibrium measure
for p in np.linspace(0, 1, 6):
    print(f"  I^V(({p:.1f}, {1 - p:.1f})) = {rate_IV(model, [p, 1 - p], sr.lambda0).value:+.2e}")

# ground measures on a grid of the simplex
grid = np.linspace(0, 1, 101)
gm = [float(p) for p in grid if check_ground_measure(model, [p, 1 - p], sr.lambda0)]
print("ground measures found (weight on state 0):", gm)

for t in (1, 10, 100):
    print(f"  ||P_t^V|| at t = {t:>3}: {normalized_kernel(model, 0.0, t).sum(axis=1).max():.10g}")
print("growth flagged unbounded:", growth_constant(model, 0.0).unbounded)

try:
    construct_ground_measure(model, [0.5, 0.5], 0.0)
except HypothesisViolated as exc:
    print("construction refused:", exc)
