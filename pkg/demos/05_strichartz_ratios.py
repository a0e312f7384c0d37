"""Ratio experiments at desk scale.

Each run evaluates both sides of an estimate over a seeded family and
checks that the largest ratio stays put under grid refinement.  The sizes
here are small so the script finishes in seconds; the configs/ directory
holds the full-size versions.
"""
from divfree_strichartz.experiments import preset, run

small = dict(levels=(32, 64), M=64, trials=8, cutoff=8)
for name in ("prop1", "thm2", "thm7", "lemma1"):
    rep = run(preset(name, **small))
    print(f"{name:8s} max ratio per level {rep.level_max}, growth {rep.growth:+.2e}, "
          f"passed {rep.passed}")

# dilations leave scale-invariant ratios unchanged
rep = run(preset("scaling_thm2", levels=(64,), M=64, trials=2, cutoff=8))
print("scaling sweep, max ratio per lambda:", rep.scaling)

# the L1 ratio of a Riesz transform keeps growing as a bump narrows
rep = run(preset("riesz_demo"))
print("Riesz L1 ratios:", [round(float(r), 3) for r in rep.ratios(256)])
