"""Divergence-free vector fields and the ratios built from them.

The generators certify zero divergence.  Stream functions recover planar
fields exactly.  The two L1 ratios stay bounded as the grid is refined.
"""
from divfree_strichartz.fields import (DivFreeGenerator, curl_of_stream, divergence,
                                       jacobian_det, leray_project, lemma1_ratio,
                                       random_field, stream_function, vs_ratio)
from divfree_strichartz.spectral_core import Grid, lebesgue_norm

gen = DivFreeGenerator("projected_random", seed=4, cutoff=10)
for N in (64, 128):
    F = gen.generate(Grid(2, N))
    G = stream_function(F)
    back = curl_of_stream(G)
    print(f"N={N}: max|div F| {abs(divergence(F).samples).max():.1e}, "
          f"roundtrip error {abs(back.data - F.data).max():.1e}")
    # the cutoff is fixed, so both ratios barely move with N
    print(f"       lemma1 ratio {lemma1_ratio(F):.5f}, vs ratio (alpha=1) {vs_ratio(F, 1.0):.5f}")

# Leray projection removes the gradient part of an arbitrary field
grid = Grid(3, 32)
V = random_field(grid, seed=2, n_components=3, cutoff=6)
P = leray_project(V)
print("3D Leray: max|div P V| =", abs(divergence(P).samples).max())

# the Jacobian of a planar map, via the dealiased product
A = gen.generate(Grid(2, 64))
J = jacobian_det(A)
print("||det grad A||_1 =", lebesgue_norm(J, 1))
