"""Pseudospectral checks of Strichartz estimates with divergence-free forcing.

Modules
-------
spectral_core
    periodic grids, Fourier multipliers, Lebesgue and Sobolev norms
fields
    divergence-free vector fields, stream functions, seeded generators, file I/O
evolution
    wave and Schrodinger propagators with Duhamel forcing, space-time norms
exponents
    exact-rational exponent conditions, alpha selections, enumeration
experiments
    both sides of each estimate over seeded families, ratio reports
cli
    command-line entry point
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .spectral_core import (Grid, MultiplierSpec, ScalarField, VectorField,
                            apply_multiplier, band_limit, dealiased_product,
                            fractional_laplacian, lebesgue_norm, partial,
                            riesz_transform, sobolev_lp_norm, sobolev_norm)
from .fields import (DivFreeGenerator, curl_of_stream, divergence, jacobian_det,
                     l1_norm, leray_project, lemma1_ratio, load_field,
                     random_field, save_field, stream_function, vs_ratio)
from .evolution import (SpaceTimeField, WaveData, energy_check,
                        export_trajectory, load_trajectory, schrodinger_solve,
                        spacetime_norm, time_norm, wave_solve)
from .exponents import (INF, AlphaChoice, CheckResult, ExponentTuple, Violation,
                        check, check_inhomo_wave3d, check_schrodinger,
                        check_schrodinger_scalar, check_taggart,
                        check_wave_scalar, check_wave_system,
                        enumerate_exponents, parse_exponent, reduced_tuple,
                        select_alpha_inhomo, select_alpha_schrod,
                        select_alpha_wave, taggart_reduction)
from .experiments import (ExperimentConfig, RatioReport, TrialRecord, preset, run,
                          run_lemma1, run_prop1, run_riesz_demo,
                          run_scaling_sweep, run_thm2, run_thm5, run_thm7,
                          run_vanschaftingen, run_wente, run_wente_wave)
