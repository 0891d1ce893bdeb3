"""Green potentials of radial measures and their weighted norms.

Builds the mode-0 Green kernel on the unit ball, superposes an origin
atom, a spherical shell and a smooth density, and checks the duality
pairing against a dual solution with smooth data.
"""

import math

import numpy as np

from hardylab import (DirichletProblem, HardyParams, OperatorKind,
                      RadialMeasure, build_mesh, exponents, from_callable,
                      gamma_weight, green_mode0, integrate, measure_norm,
                      potential, solve_dual)

params = HardyParams(3, 2.0)
ex = exponents(params)
mesh = build_mesh(0.0, 1.0, 1024, grading=3.0)

# classical sanity check at mu=0: G(r, s) = (1/s - 1)/(4 pi) inside s
g0 = green_mode0(HardyParams(3, 0.0), 1.0)
print(f"mu=0 kernel at (r,s)=(0.2,0.5): {g0(0.2, 0.5):.6f} "
      f"(exact {(1 / 0.5 - 1) / (4 * math.pi):.6f})")

dens = from_callable(mesh, lambda r: np.ones_like(np.asarray(r, float)))
nu = RadialMeasure(dirac_strength=1.0, shells=((0.4, 0.5),), density=dens)
u = potential(nu, params, 1.0, mesh)
nrm = measure_norm(nu, params)
print(f"measure norm: weighted={nrm.weighted:.5f}, atom={nrm.atom:.5f}, "
      f"total={nrm.total:.5f}")

# duality pairing: int u f dgamma = k xi(0) + sum m Gamma(s) xi(s) + int xi Gamma rho
f = from_callable(mesh, lambda r: 1.0 + 0.5 * np.cos(
    math.pi * np.asarray(r, float)))
xi = solve_dual(DirichletProblem(params=params, mesh=mesh,
                                 kind=OperatorKind.dual(), f=f)).u
gam = gamma_weight(params)
lhs = integrate(
    type(u)(mesh=u.mesh, values=u.values * f.node_values(), exponent=u.exponent),
    gam)
rhs = float(xi(0.0))                       # atom, strength 1
rhs += 0.5 * 0.4 ** ex.tau_plus * float(xi(0.4))   # shell
rhs += integrate(type(dens)(mesh=mesh, values=dens.values * xi.node_values()),
                 gam)                      # density
print(f"pairing lhs = {lhs:.8f}, rhs = {rhs:.8f}, "
      f"defect = {abs(lhs - rhs):.2e}")
print(f"bound check: |lhs| <= ||nu|| * ||xi||_inf -> "
      f"{abs(lhs):.5f} <= {nrm.total * float(np.max(np.abs(xi.values))):.5f}")
