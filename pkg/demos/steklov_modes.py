"""Steklov eigenvalues for one circular hole of radius 0.2 on two tori.

Printed values are sigma/2, the scale of the reference values in the bundled configs.

Run: python demos/steklov_modes.py
"""
import numpy as np

from torus_bie import Hole, LayerOperators, Torus, build_grid, solve_steklov, steklov_residuals

for name, torus in (("square", Torus.square()), ("equilateral", Torus.equilateral())):
    grid = build_grid([Hole.circle(0.5 + 0.5j, 0.2)], 50, torus)
    pairs = solve_steklov(grid, 7)
    res = steklov_residuals(pairs, grid, 2, LayerOperators(grid.refined(2)))
    print(f"{name} torus")
    for k, (p, r) in enumerate(zip(pairs, res), start=1):
        print(f"  sigma_{k} / 2 = {p.sigma / 2:12.8f}   residual {r:.1e}")
    print(f"  trace of mode 1 is constant: spread {np.ptp(pairs[0].trace):.1e}")
