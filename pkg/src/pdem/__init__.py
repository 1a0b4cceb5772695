"""Solvers for the 1-D Schrodinger equation with a position-dependent effective mass.

Engines
-------
tmm
    Piecewise-constant slabs joined by interface transfer matrices.
coupled
    Continuum limit of the slab matrices: a first-order ODE for the
    forward and backward amplitudes.
semiclassical
    Extended WKB states ``sqrt(m*/k) exp(+-i theta)``, quantization,
    tunneling and piecewise matching at sharp interfaces.
exact
    Airy-function solution of the linear-mass infinite well and the
    transform to a constant-mass equation.
"""
from . import core, coupled, exact, numerics, semiclassical, tmm
from .core import (Constant, Engine, HardWall, Lead, Linear, PhysicalConstants, PiecewiseConstant,
                   Problem, Scattering, Tabulated, Wavefunction, linear_well, normalize)
from .errors import PDEMError

__version__ = "0.1.0"

__all__ = [
    "core", "coupled", "exact", "numerics", "semiclassical", "tmm",
    "Constant", "Engine", "HardWall", "Lead", "Linear", "PhysicalConstants", "PiecewiseConstant",
    "Problem", "Scattering", "Tabulated", "Wavefunction", "linear_well", "normalize", "PDEMError",
]
