"""Exact reference solutions.

Linear-mass infinite well
-------------------------
For V = 0 and ``m*(x) = alpha x + beta`` the substitution ``u = psi'/m*``
turns the equation into ``u'' = -(E/C) m*(x) u``, i.e. Airy's equation
``u_yy = y u`` in ``y = -s (x + beta/alpha)`` with ``s^3 = E alpha / C``.
Since ``psi = -(C/E) u'``, the hard walls require ``u_y = 0`` at both ends,
so the levels are the zeros of::

    D(E) = Ai'(y(-a)) Bi'(y(a)) - Ai'(y(a)) Bi'(y(-a))

and the states are ``psi ~ A Ai'(y(x)) + B Bi'(y(x))``.

Constant-mass transform
-----------------------
With ``y = integral sqrt(m*) dx`` and ``phi = psi / m*^(1/4)`` the problem
becomes a unit-mass equation in y with the extra potential::

    F = -(C / 4 m*) [ m*''/m* - (7/4) (m*'/m*)^2 ]
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq
from scipy.special import airy as _scipy_airy

from .core import (Constant, Engine, HardWall, Linear, PhysicalConstants, Problem, Tabulated,
                   Wavefunction, normalize, profile_derivative)
from .errors import DomainError
from .numerics import adaptive_simpson, bisect_brackets, scan_brackets
from .semiclassical import linear_well_energy

logger = logging.getLogger(__name__)

__all__ = [
    "AIRY_RANGE",
    "AiryPair",
    "airy",
    "ExactSpectrum",
    "linear_well_parameters",
    "eigen_determinant",
    "linear_well_exact_spectrum",
    "linear_well_exact_wavefunction",
    "F_READINGS",
    "f_correction",
    "TransformedProblem",
    "to_constant_mass",
]

AIRY_RANGE = 25.0


class AiryPair(NamedTuple):
    ai: np.ndarray
    ai_prime: np.ndarray
    bi: np.ndarray
    bi_prime: np.ndarray


def airy(y) -> AiryPair:
    """Ai, Ai', Bi, Bi' for real ``|y| <= 25``."""
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > AIRY_RANGE):
        raise DomainError(f"Airy argument outside the supported range |y| <= {AIRY_RANGE}")
    ai, aip, bi, bip = _scipy_airy(y)
    if y.ndim == 0:
        return AiryPair(float(ai), float(aip), float(bi), float(bip))
    return AiryPair(ai, aip, bi, bip)


class ExactSpectrum(NamedTuple):
    levels: list
    truncated: bool


def linear_well_parameters(problem: Problem) -> tuple[float, float, float]:
    """(m1, m2, a) of a hard-wall problem with a linear mass and V = 0.

    m1 is the mass at the right wall and m2 at the left; the well is
    translated to [-a, a].
    """
    if not isinstance(problem.boundary, HardWall):
        raise DomainError("the Airy solution needs hard walls")
    if not (isinstance(problem.potential, Constant) and problem.potential.value == 0):
        raise DomainError("the Airy solution needs V = 0 inside the well")
    if not isinstance(problem.mass, (Linear, Constant)):
        raise DomainError("the Airy solution needs a linear (or constant) mass profile")
    a = 0.5 * problem.length
    return float(problem.m(problem.x_max)), float(problem.m(problem.x_min)), a


def _y_of_x(m1, m2, a, E, x, C):
    alpha = (m1 - m2) / (2 * a)
    beta = (m1 + m2) / 2
    s = np.cbrt(np.asarray(E, dtype=float) * alpha / C)
    return -s * (np.asarray(x, dtype=float) + beta / alpha)


def eigen_determinant(m1: float, m2: float, a: float, E, constants: PhysicalConstants | None = None):
    """D(E) for the linear-mass well; zero exactly at the eigenvalues."""
    C = (constants or PhysicalConstants()).hbar2_over_2m0
    left = airy(_y_of_x(m1, m2, a, E, -a, C))
    right = airy(_y_of_x(m1, m2, a, E, a, C))
    return left.ai_prime * right.bi_prime - right.ai_prime * left.bi_prime


def _max_energy(m1, m2, a, C):
    alpha = abs(m1 - m2) / (2 * a)
    return AIRY_RANGE**3 * alpha**2 * C / max(m1, m2) ** 3


def linear_well_exact_spectrum(m1: float, m2: float, a: float, n_max: int,
                               constants: PhysicalConstants | None = None,
                               tol: float = 1e-9, scan_per_level: int = 200) -> ExactSpectrum:
    """Lowest ``n_max`` levels of the linear-mass infinite well on [-a, a].

    Zeros of :func:`eigen_determinant` are bracketed on an energy scan and
    bisected to ``tol``.  The scan stops where the Airy argument would leave
    its supported range; ``truncated`` reports a short result.  Equal masses
    use the constant-mass sine-well formula.
    """
    if not (a > 0 and m1 > 0 and m2 > 0):
        raise ValueError("need a > 0 and positive masses")
    constants = constants or PhysicalConstants()
    C = constants.hbar2_over_2m0
    if np.isclose(m1, m2, rtol=1e-12, atol=0):
        levels = [(n, n**2 * np.pi**2 * C / (m1 * (2 * a) ** 2)) for n in range(1, n_max + 1)]
        return ExactSpectrum(levels, False)
    # the exact level n lies below the WKB level n + 1
    E_top = linear_well_energy(m1, m2, a, n_max + 1, constants)
    E_cap = _max_energy(m1, m2, a, C)
    E_hi = min(E_top, E_cap)
    E_lo = 1e-6 * linear_well_energy(m1, m2, a, 1, constants)
    grid = np.linspace(E_lo, E_hi, scan_per_level * (n_max + 1))

    def D(E):
        return eigen_determinant(m1, m2, a, E, constants)

    idx = scan_brackets(D(grid))
    roots = bisect_brackets(D, grid[idx], grid[idx + 1], tol)[:n_max]
    levels = [(n, float(E)) for n, E in enumerate(roots, start=1)]
    truncated = len(levels) < n_max
    if truncated:
        logger.warning("found %d of %d levels below %.4g eV", len(levels), n_max, E_hi)
    return ExactSpectrum(levels, truncated)


def linear_well_exact_wavefunction(m1: float, m2: float, a: float, n: int, points: int = 2048,
                                   constants: PhysicalConstants | None = None,
                                   energy: float | None = None) -> Wavefunction:
    """Normalized n-th exact state on a uniform grid over [-a, a]."""
    constants = constants or PhysicalConstants()
    C = constants.hbar2_over_2m0
    x = np.linspace(-a, a, points)
    if energy is None:
        spectrum = linear_well_exact_spectrum(m1, m2, a, n, constants, tol=1e-13)
        if len(spectrum.levels) < n:
            raise DomainError(f"level n={n} is outside the computable spectrum")
        energy = spectrum.levels[n - 1][1]
    if np.isclose(m1, m2, rtol=1e-12, atol=0):
        psi = np.sin(n * np.pi * (x + a) / (2 * a))
    else:
        left = airy(_y_of_x(m1, m2, a, energy, -a, C))
        A, B = left.bi_prime, -left.ai_prime
        pair = airy(_y_of_x(m1, m2, a, energy, x, C))
        psi = A * pair.ai_prime + B * pair.bi_prime
    return normalize(Wavefunction(x, psi.astype(complex), float(energy), Engine.AIRY))


# --------------------------------------------------------------------------
# Transform to a constant-mass equation
# --------------------------------------------------------------------------

# overall sign of the printed correction; "normalized" is the derived form
F_READINGS = {"normalized": 1.0, "sign_flipped": -1.0}


def f_correction(problem: Problem, x, reading: str = "normalized"):
    """Extra potential (eV) produced by the constant-mass transform.

    ``F = -(C / 4 m*) [m*''/m* - (7/4) (m*'/m*)^2]`` with ``C = hbar^2/2m0``.
    """
    sign = F_READINGS[reading]
    m = problem.m(x)
    dm = profile_derivative(problem.mass, x, 1)
    d2m = profile_derivative(problem.mass, x, 2)
    return sign * -(problem.C / (4 * m)) * (d2m / m - 1.75 * (dm / m) ** 2)


@dataclass(frozen=True)
class TransformedProblem:
    source: Problem
    x: np.ndarray
    y: np.ndarray
    potential: np.ndarray
    reading: str

    def y_of_x(self, x: float) -> float:
        """y at an arbitrary point, integrating from the nearest grid node."""
        i = int(np.clip(np.searchsorted(self.x, x) - 1, 0, self.x.size - 2))
        if x - self.x[i] > self.x[i + 1] - x:
            i += 1
        return self.y[i] + adaptive_simpson(lambda s: np.sqrt(self.source.m(s)), self.x[i], x, 1e-13)

    def x_of_y(self, y: float) -> float:
        if not self.y[0] <= y <= self.y[-1]:
            raise DomainError("y outside the transformed domain")
        i = int(np.clip(np.searchsorted(self.y, y) - 1, 0, self.y.size - 2))
        return float(brentq(lambda s: self.y_of_x(s) - y, self.x[i], self.x[i + 1],
                            xtol=1e-14, rtol=4 * np.finfo(float).eps))

    def problem(self) -> Problem:
        """Unit-mass problem on [0, y_max] with the transformed potential."""
        return Problem(
            x_min=0.0,
            x_max=float(self.y[-1]),
            mass=Constant(1.0),
            potential=Tabulated(self.y, self.potential),
            boundary=self.source.boundary,
            constants=self.source.constants,
        )


def to_constant_mass(problem: Problem, grid_points: int = 4001,
                     reading: str = "normalized") -> TransformedProblem:
    """Map a variable-mass problem to unit mass via ``y = integral sqrt(m*) dx``.

    The returned potential is ``V(x(y)) + F(x(y))`` sampled on the y-images
    of a uniform x-grid.
    """
    x = np.linspace(problem.x_min, problem.x_max, grid_points)
    pieces = [adaptive_simpson(lambda s: np.sqrt(problem.m(s)), x[i], x[i + 1], 1e-13)
              for i in range(grid_points - 1)]
    y = np.concatenate([[0.0], np.cumsum(pieces)])
    potential = np.asarray(problem.V(x)) + f_correction(problem, x, reading)
    return TransformedProblem(problem, x, y, potential, reading)

