"""Time-averaged ground measures.

Starting from an equilibrium measure mu, the averages pi_bar_T approach the
left Perron measure; the invariance defect halves when T doubles and the
relative entropy H(mu, pi_bar_T) never exceeds log M.
"""

import numpy as np

from groundstate import MarkovModel, construct_ground_measure, eigen_equilibrium, principal

rng = np.random.default_rng(3)
n = 5
R = rng.uniform(0.1, 3.0, size=(n, n))
np.fill_diagonal(R, 0.0)
model = MarkovModel(n, R - np.diag(R.sum(axis=1)), rng.uniform(-1, 1, size=n))
mu = eigen_equilibrium(model).weights
trace = construct_ground_measure(model, mu, T_max=50)

print(f"M = {trace.M:.6f}, log M = {trace.log_M:.6f}")
print(f"{'T':>6} {'H(mu,pi_bar)':>14} {'residual':>10} {'l1 to Perron':>13}")
for T in (1, 2, 5, 10, 25, 50):
    k = trace.at(T)
    print(f"{T:6g} {trace.H[k]:14.6f} {trace.invariance_residual[k]:10.3e} "
          f"{trace.tv_to_limit[k]:13.3e}")
ratio = trace.invariance_residual[trace.at(25)] / trace.invariance_residual[trace.at(50)]
print(f"residual(25) / residual(50) = {ratio:.3f}")
print("final ground-measure check:", trace.final_check)
