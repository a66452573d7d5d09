"""Kernels by uniformization, checked against the Volterra (Duhamel) equation.

The trapezoid discretization of w = P_t f + int P_{t-s} V w ds converges at
second order, and the Schrodinger kernel sits between e^{t min V} P_t and
e^{t max V} P_t.
"""

import numpy as np

from groundstate import duhamel_solve, kernel, sandwich_check, two_state_model

model = two_state_model(a=1.0, b=2.0, V=(0.5, -0.3))
f = np.array([1.0, 2.0])
exact = kernel(model, 1.0).entries @ f
prev = None
for steps in (16, 32, 64, 128, 256):
    err = np.max(np.abs(duhamel_solve(model, 1.0, f, steps) - exact))
    order = "" if prev is None else f"  order {np.log2(prev / err):.3f}"
    print(f"steps {steps:4d}: error {err:.3e}{order}")
    prev = err

P = kernel(model, 0.4).entries
Q = kernel(model, 0.6).entries
print("semigroup law residual:", np.abs(P @ Q - kernel(model, 1.0).entries).max())
print("sandwich:", sandwich_check(model, 2.0, f))
