"""Fourier multipliers on the periodic torus.

Plane waves are eigenfunctions of every multiplier, so they make a quick
sanity check.  Random fields then show Parseval and the Riesz identity.
"""
import numpy as np

from divfree_strichartz.fields import random_field
from divfree_strichartz.spectral_core import (Grid, ScalarField, fractional_laplacian,
                                              lebesgue_norm, riesz_transform,
                                              sobolev_norm)

grid = Grid(2, 64)
x1, x2 = grid.coordinates()

# exp(i(3 x1 - 5 x2)) has |k| = sqrt(34)
w = ScalarField(grid, np.exp(1j * (3 * x1 - 5 * x2)))
half = fractional_laplacian(w, 0.5)
print("|k|^(1/2) from the multiplier:", half.samples[0, 0].real)
print("|k|^(1/2) by hand:            ", 34 ** 0.25)

r1 = riesz_transform(w, 1)
print("R_1 symbol -i k1/|k|:", r1.samples[0, 0], "vs", -3j / np.sqrt(34))

# Parseval: ||u||_2 from samples equals ||u||_{H^0} from coefficients
u = random_field(grid, seed=1, cutoff=12)
print("L2 from samples:     ", lebesgue_norm(u, 2))
print("H^0 from coefficients:", sobolev_norm(u, 0))

# R_1^2 + R_2^2 = -1 on mean-zero fields
g = u - ScalarField(grid, np.full(grid.shape, u.coefficients[0, 0]))
lhs = riesz_transform(riesz_transform(g, 1), 1) + riesz_transform(riesz_transform(g, 2), 2)
print("max |R1^2 g + R2^2 g + g|:", np.max(np.abs((lhs + g).samples)))
