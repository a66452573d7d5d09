"""Ground measure, ground state and equilibrium measure for one chain.

Taking pi from the left Perron vector and mu = psi pi from the right one, all
three predicates hold; the psi-transform is then a Markov kernel that leaves
mu invariant.  Moving pi slightly breaks two of the three.
"""

import numpy as np

from groundstate import eigen_equilibrium, h_kernel, principal, two_state_model, verify_triple

model = two_state_model()
sr = principal(model)
pi = sr.phi.weights
mu = eigen_equilibrium(model, sr).weights


def show(title, report):
    print(title)
    for name, pred in [("ground measure", report.ground_measure),
                       ("ground state", report.ground_state),
                       ("equilibrium", report.equilibrium)]:
        print(f"  {name:15s} {'pass' if pred.passed else 'fail'}  residual {pred.residual:.2e}")
    for imp in report.implications:
        print("   ", imp)


show("Perron triple", verify_triple(model, pi, mu))
K = h_kernel(model, mu / pi, sr.lambda0, 1.0).entries
print("psi-transform at t = 1:\n", K, "\nrow sums", K.sum(axis=1), "\nmu K - mu", mu @ K - mu)

pi2 = pi * np.array([1.01, 1.0])
show("pi moved by 1% at state 0", verify_triple(model, pi2 / pi2.sum(), mu))
