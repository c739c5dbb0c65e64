"""A short tour of theta1 and the torus Green's function.

Run: python demos/green_function_tour.py
"""
import numpy as np

from torus_bie import Torus, green, theta1, theta1_prime_at_zero

for name, torus in (("square", Torus.square()), ("equilateral", Torus.equilateral())):
    z = 0.31 + 0.17j
    th = theta1(z, torus)
    print(f"{name} torus, tau = {torus.tau:.6f}")
    print(f"  theta1(z)           = {th:.15g}")
    print(f"  theta1(z + 1)       = {theta1(z + 1, torus):.15g}   (sign flip)")
    print(f"  theta1'(0)          = {theta1_prime_at_zero(torus):.15g}")

    # G has zero cell average, is even and doubly periodic
    g = green(z, torus)
    print(f"  G(z), G(-z), G(z+tau) = {g:.15f}, {green(-z, torus):.15f}, {green(z + torus.tau, torus):.15f}")

    # near the origin G behaves like the free-space kernel plus a constant
    r = np.logspace(-1, -5, 5)
    print("  G(r) + log(r)/(2 pi):", np.array2string(green(r + 0j, torus) + np.log(r) / (2 * np.pi), precision=10))
