"""Walk through the derived constants for a few parameter choices.

For each (N, mu) above the Hardy threshold we print the indicial
exponents, the Dirac normalization constant c_mu, and the critical
gradient-integrability exponent p_star, then show how the admissible
range of mu is bounded below.
"""

import math

from hardylab import HardyParams, exponents, supersolution_margin

cases = [(3, 0.0), (3, 2.0), (4, 1.0), (5, -2.0), (3, -0.15)]

print(f"{'N':>2} {'mu':>7} {'tau_plus':>10} {'tau_minus':>10} "
      f"{'c_mu':>10} {'p_star':>8} {'dual?':>6}")
for n, mu in cases:
    params = HardyParams(n, mu)
    ex = exponents(params)
    print(f"{n:>2} {mu:>7.3f} {ex.tau_plus:>10.5f} {ex.tau_minus:>10.5f} "
          f"{ex.c_mu:>10.4f} {ex.p_star:>8.4f} "
          f"{'yes' if params.dual_solvable else 'no':>6}")

print()
print("The dual problem is solvable strictly above (3/4) * mu0:")
for n in (3, 4, 5):
    mu0 = -((n - 2) ** 2) / 4.0
    edge = 0.75 * mu0
    margin_above = supersolution_margin(HardyParams(n, edge + 0.01))
    print(f"  N={n}: mu0 = {mu0:.4f}, edge = {edge:.4f}, "
          f"barrier margin just above the edge = {margin_above:.4f}")

print()
print("Below the Hardy threshold the parameters are rejected outright:")
try:
    HardyParams(3, -0.3)
except ValueError as err:
    print(f"  HardyParams(3, -0.3) -> ValueError: {err}")
