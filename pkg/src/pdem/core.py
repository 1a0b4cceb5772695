"""Problem definitions, profile evaluation and wavefunction containers.

Units used throughout the package:

* lengths in nm
* energies in eV
* masses in units of the free electron mass m0

With these units the only physical constant needed is ``hbar**2 / (2 m0)``
in eV nm^2, and the local wavenumber is ``k = sqrt(m (E - V) / C)``.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from typing import Union

import numpy as np
import scipy.constants as const

from .errors import DegenerateWavefunctionError, ProfileError

__all__ = [
    "HBAR2_OVER_2M0",
    "PhysicalConstants",
    "Profile",
    "Constant",
    "Linear",
    "PiecewiseConstant",
    "Tabulated",
    "Lead",
    "HardWall",
    "Scattering",
    "Problem",
    "Engine",
    "Wavefunction",
    "eval_profile",
    "profile_derivative",
    "wavenumber",
    "normalize",
    "linear_well",
    "codata_hbar2_over_2m0",
    "equation_residual",
]

HBAR2_OVER_2M0 = 0.0380998

ArrayLike = Union[float, np.ndarray]


def codata_hbar2_over_2m0() -> float:
    """hbar^2 / (2 m_e) in eV nm^2 from the installed CODATA tables."""
    return const.hbar**2 / (2 * const.m_e) / const.e * 1e18


@dataclass(frozen=True)
class PhysicalConstants:
    hbar2_over_2m0: float = HBAR2_OVER_2M0

    def __post_init__(self):
        if not self.hbar2_over_2m0 > 0:
            raise ValueError("hbar2_over_2m0 must be strictly positive")


# --------------------------------------------------------------------------
# Profiles
# --------------------------------------------------------------------------

MASS = "mass"
POTENTIAL = "potential"


@dataclass(frozen=True)
class Profile:
    """Base class for m*(x) and V(x) profiles.

    ``quantity`` is either ``"mass"`` (values in m0, must stay positive) or
    ``"potential"`` (values in eV).  :class:`Problem` re-tags the profiles it
    receives, so callers rarely need to set it.
    """

    def _check(self):
        if self.quantity not in (MASS, POTENTIAL):
            raise ProfileError(f"unknown profile quantity {self.quantity!r}")


@dataclass(frozen=True)
class Constant(Profile):
    value: float
    quantity: str = POTENTIAL

    def __post_init__(self):
        self._check()
        if self.quantity == MASS and not self.value > 0:
            raise ProfileError(f"mass must be positive, got {self.value}")


@dataclass(frozen=True)
class Linear(Profile):
    """Straight line through ``(x_left, value_at_left)`` and ``(x_right, value_at_right)``.

    Evaluated as the analytic line everywhere (no clamping).
    """

    x_left: float
    x_right: float
    value_at_left: float
    value_at_right: float
    quantity: str = POTENTIAL

    def __post_init__(self):
        self._check()
        if not self.x_left < self.x_right:
            raise ProfileError("Linear profile needs x_left < x_right")
        if self.quantity == MASS and not (self.value_at_left > 0 and self.value_at_right > 0):
            raise ProfileError("mass must be positive at both ends of a Linear profile")

    @property
    def slope(self) -> float:
        return (self.value_at_right - self.value_at_left) / (self.x_right - self.x_left)


@dataclass(frozen=True)
class PiecewiseConstant(Profile):
    """Step profile: ``values[i]`` holds on ``breakpoints[i-1] <= x < breakpoints[i]``."""

    breakpoints: tuple
    values: tuple
    quantity: str = POTENTIAL

    def __post_init__(self):
        self._check()
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", tuple(bp.tolist()))
        object.__setattr__(self, "values", tuple(vals.tolist()))
        if len(vals) != len(bp) + 1:
            raise ProfileError("PiecewiseConstant needs len(values) == len(breakpoints) + 1")
        if np.any(np.diff(bp) <= 0):
            raise ProfileError("breakpoints must be strictly increasing")
        if self.quantity == MASS and np.any(vals <= 0):
            raise ProfileError("mass must be positive on every piece")


@dataclass(frozen=True)
class Tabulated(Profile):
    """Linear interpolation of samples, clamped to the end values outside the table."""

    x: tuple
    values: tuple
    quantity: str = POTENTIAL

    def __post_init__(self):
        self._check()
        xs = np.asarray(self.x, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if xs.ndim != 1 or xs.shape != vals.shape or xs.size < 2:
            raise ProfileError("Tabulated profile needs two equal-length 1-D arrays (>= 2 samples)")
        if np.any(np.diff(xs) <= 0):
            raise ProfileError("tabulated x-samples must be strictly increasing")
        if self.quantity == MASS and np.any(vals <= 0):
            raise ProfileError("mass must be positive at every tabulated sample")
        # keep arrays for fast np.interp; tuples would be converted on every call
        object.__setattr__(self, "x", xs)
        object.__setattr__(self, "values", vals)

    def __hash__(self):
        return hash((self.x.tobytes(), self.values.tobytes(), self.quantity))

    def __eq__(self, other):
        return (
            isinstance(other, Tabulated)
            and self.quantity == other.quantity
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.values, other.values)
        )


def _as_quantity(profile: Profile, quantity: str) -> Profile:
    if profile.quantity == quantity:
        return profile
    return dataclasses.replace(profile, quantity=quantity)


def eval_profile(profile: Profile, x: ArrayLike, side: str = "right") -> ArrayLike:
    """Evaluate a profile at ``x`` (scalar or array).

    ``side`` only matters exactly at a PiecewiseConstant breakpoint:
    ``"right"`` returns the value of the piece starting there, ``"left"``
    the one ending there.
    """
    xa = np.asarray(x, dtype=float)
    if isinstance(profile, Constant):
        out = np.full(xa.shape, float(profile.value))
    elif isinstance(profile, Linear):
        out = profile.value_at_left + profile.slope * (xa - profile.x_left)
    elif isinstance(profile, PiecewiseConstant):
        idx = np.searchsorted(profile.breakpoints, xa, side="right" if side == "right" else "left")
        out = np.asarray(profile.values)[idx]
    elif isinstance(profile, Tabulated):
        out = np.interp(xa, profile.x, profile.values)
    else:
        raise ProfileError(f"unsupported profile kind {type(profile).__name__}")
    if profile.quantity == MASS and np.any(out <= 0):
        bad = xa[out <= 0] if xa.ndim else xa
        raise ProfileError(f"non-positive effective mass at x = {np.ravel(bad)[0]:g} nm")
    return out if xa.ndim else float(out)


def profile_derivative(profile: Profile, x: ArrayLike, order: int = 1, step: float = 1e-5) -> ArrayLike:
    """First or second x-derivative of a profile.

    Analytic for Constant, Linear and PiecewiseConstant (zero away from the
    jumps); symmetric central differences with ``step`` nm otherwise.  Second
    derivatives of a Tabulated profile use at least the local sample spacing.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    xa = np.asarray(x, dtype=float)
    if isinstance(profile, (Constant, PiecewiseConstant)):
        out = np.zeros(xa.shape)
    elif isinstance(profile, Linear):
        out = np.full(xa.shape, profile.slope if order == 1 else 0.0)
    else:
        if order == 2 and isinstance(profile, Tabulated):
            # a linear interpolant has no curvature inside a segment; difference the samples instead
            spacing = np.diff(profile.x)
            seg = np.clip(np.searchsorted(profile.x, xa) - 1, 0, spacing.size - 1)
            step = np.maximum(step, spacing[seg])
        fp = eval_profile(profile, xa + step)
        fm = eval_profile(profile, xa - step)
        if order == 1:
            out = (fp - fm) / (2 * step)
        else:
            out = (fp - 2 * eval_profile(profile, xa) + fm) / step**2
    return out if xa.ndim else float(out)


# --------------------------------------------------------------------------
# Problems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Lead:
    """Semi-infinite uniform region attached to one side of a scattering problem."""

    mass: float
    potential: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ProfileError(f"lead mass must be positive, got {self.mass}")


@dataclass(frozen=True)
class HardWall:
    """psi(x_min) = psi(x_max) = 0."""


@dataclass(frozen=True)
class Scattering:
    left_lead: Lead
    right_lead: Lead


@dataclass(frozen=True)
class Problem:
    x_min: float
    x_max: float
    mass: Profile
    potential: Profile = field(default_factory=lambda: Constant(0.0))
    boundary: Union[HardWall, Scattering] = field(default_factory=HardWall)
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be smaller than x_max")
        object.__setattr__(self, "mass", _as_quantity(self.mass, MASS))
        object.__setattr__(self, "potential", _as_quantity(self.potential, POTENTIAL))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def C(self) -> float:
        return self.constants.hbar2_over_2m0

    def m(self, x, side="right"):
        return eval_profile(self.mass, x, side)

    def V(self, x, side="right"):
        return eval_profile(self.potential, x, side)


def linear_well(m1: float, m2: float, a: float, constants: PhysicalConstants | None = None) -> Problem:
    """Infinite well on [-a, a] with m*(-a) = m2, m*(a) = m1 and V = 0 inside."""
    return Problem(
        x_min=-a,
        x_max=a,
        mass=Linear(-a, a, m2, m1),
        potential=Constant(0.0),
        boundary=HardWall(),
        constants=constants or PhysicalConstants(),
    )


def wavenumber(problem: Problem, E: ArrayLike, x: ArrayLike, side: str = "right") -> ArrayLike:
    """Local wavenumber k(x) in nm^-1, complex.

    Real and positive where E > V, ``+i kappa`` where E < V, zero at a
    turning point.  Broadcasts over ``E`` and ``x``.
    """
    m = eval_profile(problem.mass, x, side)
    V = eval_profile(problem.potential, x, side)
    arg = np.asarray(m * (np.asarray(E, dtype=float) - V) / problem.C, dtype=complex)
    # +0j imaginary part picks the +i branch of the principal square root
    k = np.sqrt(arg.real + 0j)
    return complex(k) if k.ndim == 0 else k


# --------------------------------------------------------------------------
# Wavefunctions
# --------------------------------------------------------------------------

class Engine(str, enum.Enum):
    TMM = "tmm"
    COUPLED = "coupled"
    WKB = "wkb"
    AIRY = "airy"


@dataclass(frozen=True)
class Wavefunction:
    grid: np.ndarray
    values: np.ndarray
    energy: float
    engine: Engine
    normalized: bool = False

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-D arrays of equal length")
        if grid.size >= 2 and np.any(np.diff(grid) <= 0):
            raise ValueError("wavefunction grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "engine", Engine(self.engine))

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        return float(np.trapezoid(self.density, self.grid))

    def __call__(self, x):
        """Linear interpolation of the sampled values."""
        re = np.interp(x, self.grid, self.values.real)
        im = np.interp(x, self.grid, self.values.imag)
        return re + 1j * im

    def count_nodes(self, rel_threshold: float = 1e-6) -> int:
        """Interior sign changes of the real-aligned wavefunction."""
        vals = self.values
        peak = np.argmax(np.abs(vals))
        real = (vals * np.exp(-1j * np.angle(vals[peak]))).real
        scale = np.abs(real).max()
        keep = np.abs(real) > rel_threshold * scale
        signs = np.sign(real[keep])
        return int(np.count_nonzero(signs[1:] != signs[:-1]))


def normalize(wf: Wavefunction) -> Wavefunction:
    """Rescale so that the trapezoid integral of |psi|^2 is one.

    The global phase is fixed by making the largest-magnitude sample real
    and positive.
    """
    norm = wf.norm()
    if not norm > 0 or not np.isfinite(norm):
        raise DegenerateWavefunctionError("cannot normalize an identically-zero wavefunction")
    values = wf.values / np.sqrt(norm)
    peak = values[np.argmax(np.abs(values))]
    values = values * (abs(peak) / peak)
    return dataclasses.replace(wf, values=values, normalized=True)


def equation_residual(problem: Problem, wf: Wavefunction) -> float:
    """Relative residual of ``-(C psi'/m*)' + (V - E) psi = 0`` on the sample grid.

    Uses the conservative central difference with m* at the half points,
    so psi'/m* rather than psi' has to be smooth.  The grid must be uniform.
    Returns ``max |residual| / max |E psi|`` over interior samples.
    """
    x, psi = wf.grid, wf.values
    h = np.diff(x)
    if x.size < 3 or not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("equation_residual needs a uniform grid with >= 3 samples")
    h = h[0]
    mid = 0.5 * (x[:-1] + x[1:])
    flux = np.diff(psi) / (h * problem.m(mid))
    res = problem.C * np.diff(flux) / h + (wf.energy - problem.V(x[1:-1])) * psi[1:-1]
    scale = abs(wf.energy) * np.abs(psi).max()
    return float(np.abs(res).max() / scale)
