"""Shared helpers for the test modules."""
import numpy as np


def cell_samples(torus, n=100, seed=0):
    u, v = np.random.default_rng(seed).uniform(-0.5, 0.5, size=(2, n))
    return u + v * torus.tau
