"""Numerical harmonic analysis on the reduced Heisenberg group with
multidimensional center G = R^n x R^n x T^m.

Submodules:
    algebra       group law, bracket, anticommuting orthogonal families
    fields        grids, sampled fields, quadrature, Fourier transforms
    specials      Hermite and Laguerre machinery
    rep_fourier   Schroedinger representations, group Fourier transform,
                  Plancherel and inversion
    weyl_k        k-Wigner and k-Weyl calculus, twisted convolution
    localization  Gaussian-wavelet localization operators and products
    weyl_g        operator-valued Wigner/Weyl transform, Schatten norms,
                  unboundedness demonstrator
    suites        named verification suites
    cli           command line entry point (rhg suite <name> ...)
"""

from .algebra import (
    GroupElement,
    OrthFamily,
    build_family,
    family_from_file,
    family_preset,
    identity_element,
    inverse,
    multiply,
    translate,
)
from .fields import Axis, Field, Grid, grid, line_axis, torus_axis
from .rep_fourier import FreqIndex, KernelOp, apply_rep, as_freq, gft, invert, plancherel_gap

__all__ = [
    "GroupElement",
    "OrthFamily",
    "build_family",
    "family_preset",
    "family_from_file",
    "identity_element",
    "inverse",
    "multiply",
    "translate",
    "Axis",
    "Field",
    "Grid",
    "grid",
    "line_axis",
    "torus_axis",
    "FreqIndex",
    "KernelOp",
    "apply_rep",
    "as_freq",
    "gft",
    "invert",
    "plancherel_gap",
]

__version__ = "0.1.0"
