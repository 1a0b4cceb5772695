"""Continuum limit of the slab transfer matrix.

Letting the slab width go to zero turns the interface matrices into a
first-order system ``d/dx (t, r) = Gamma(x) (t, r)`` for the amplitudes in
``psi = t exp(i k x) + r exp(-i k x)``, where both k and the amplitudes now
depend on x.  With ``h = k/m*`` and ``g = h'/(2h)``::

    Gamma = [[-i x k' - g,          g exp(-2 i x k)],
             [ g exp(2 i x k),      i x k' - g     ]]

The x in the diagonal and in the phases is the absolute coordinate, as in
the slab formulas; psi itself does not depend on the choice of origin.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Engine, HardWall, Problem, Wavefunction, normalize, profile_derivative, wavenumber
from .errors import BoundaryKindError, DiscretizationError, SingularGammaError
from .numerics import bisect_brackets, scan_brackets
from .semiclassical import wkb_branch
from .tmm import AmplitudePair, local_transfer_matrix

__all__ = [
    "AmplitudeTrajectory",
    "gamma_matrix",
    "integrate_coupled",
    "psi_from_amplitudes",
    "first_order_consistency",
    "decoupled_closed_form",
    "boundary_mismatch",
    "find_eigenvalues",
    "eigenstate",
]

TURNING_POINT_GUARD = 1e-12


@dataclass(frozen=True)
class AmplitudeTrajectory:
    x: np.ndarray
    t: np.ndarray
    r: np.ndarray
    energy: float

    def __post_init__(self):
        if self.x.size < 2 or np.any(np.diff(self.x) <= 0):
            raise DiscretizationError("trajectory needs >= 2 strictly increasing samples")

    def pairs(self) -> list[AmplitudePair]:
        return [AmplitudePair(complex(t), complex(r)) for t, r in zip(self.t, self.r)]

    def psi(self, problem: Problem) -> np.ndarray:
        return psi_from_amplitudes(self.t, self.r, wavenumber(problem, self.energy, self.x), self.x)

    def flux_derivative(self, problem: Problem) -> np.ndarray:
        """psi'/m* = i (k/m*) (t e^{ikx} - r e^{-ikx})."""
        k = wavenumber(problem, self.energy, self.x)
        h = k / problem.m(self.x)
        return 1j * h * (self.t * np.exp(1j * k * self.x) - self.r * np.exp(-1j * k * self.x))

    def wavefunction(self, problem: Problem, normalized: bool = True) -> Wavefunction:
        wf = Wavefunction(self.x, self.psi(problem), self.energy, Engine.COUPLED)
        return normalize(wf) if normalized else wf


def _gamma_entries(problem: Problem, E, x):
    """The four entries of Gamma, broadcast over E and x."""
    E = np.asarray(E, dtype=float)
    x = np.asarray(x, dtype=float)
    m = problem.m(x)
    V = problem.V(x)
    dm = profile_derivative(problem.mass, x)
    dV = profile_derivative(problem.potential, x)
    dE = E - V
    if np.any(np.abs(dE) < TURNING_POINT_GUARD):
        raise SingularGammaError("Gamma is singular at a turning point (E = V)")
    C = problem.C
    k = np.sqrt(m * dE / C + 0j)
    dk = (dm * dE - m * dV) / (2 * C * k)
    h = k / m
    dh = dk / m - k * dm / m**2
    g = dh / (2 * h)
    phase = np.exp(2j * x * k)
    return -1j * x * dk - g, g / phase, g * phase, 1j * x * dk - g


def gamma_matrix(problem: Problem, E, x) -> np.ndarray:
    """Coupling matrix of the amplitude equations, shape ``(..., 2, 2)``."""
    a, b, c, d = np.broadcast_arrays(*_gamma_entries(problem, E, x))
    return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def psi_from_amplitudes(t, r, k, x):
    """psi = t exp(i k x) + r exp(-i k x)."""
    return t * np.exp(1j * k * x) + r * np.exp(-1j * k * x)


def _rk4(problem: Problem, E, x_start: float, x_end: float, t0, r0, steps: int,
         decoupled: bool = False, keep: bool = True):
    """Classical fourth-order Runge-Kutta with a fixed step, vectorized over E."""
    E = np.asarray(E, dtype=float)
    h = (x_end - x_start) / steps
    t = np.broadcast_to(np.asarray(t0, dtype=complex), E.shape).copy()
    r = np.broadcast_to(np.asarray(r0, dtype=complex), E.shape).copy()
    if keep:
        ts = np.empty(E.shape + (steps + 1,), dtype=complex)
        rs = np.empty_like(ts)
        ts[..., 0], rs[..., 0] = t, r

    def rhs(G, t, r):
        a, b, c, d = G
        return a * t + b * r, c * t + d * r

    def gamma(x):
        a, b, c, d = _gamma_entries(problem, E, x)
        if decoupled:
            b = c = 0.0
        return a, b, c, d

    G_next = gamma(x_start)
    for i in range(steps):
        x = x_start + i * h
        G0 = G_next
        G_half = gamma(x + 0.5 * h)
        G_next = gamma(x_start + (i + 1) * h)
        k1t, k1r = rhs(G0, t, r)
        k2t, k2r = rhs(G_half, t + 0.5 * h * k1t, r + 0.5 * h * k1r)
        k3t, k3r = rhs(G_half, t + 0.5 * h * k2t, r + 0.5 * h * k2r)
        k4t, k4r = rhs(G_next, t + h * k3t, r + h * k3r)
        t = t + h / 6 * (k1t + 2 * k2t + 2 * k3t + k4t)
        r = r + h / 6 * (k1r + 2 * k2r + 2 * k3r + k4r)
        if keep:
            ts[..., i + 1], rs[..., i + 1] = t, r
    if keep:
        return ts, rs
    return t, r


def integrate_coupled(problem: Problem, E: float, x_start: float, x_end: float,
                      initial: AmplitudePair, steps: int, decoupled: bool = False) -> AmplitudeTrajectory:
    """Integrate the amplitude equations from ``x_start`` to ``x_end``.

    With ``decoupled=True`` the off-diagonal (reflection) couplings are
    dropped, which leaves the two independent WKB equations.
    """
    if steps < 16:
        raise DiscretizationError("need at least 16 integration steps")
    if not x_end > x_start:
        raise ValueError("need x_end > x_start")
    ts, rs = _rk4(problem, E, x_start, x_end, initial[0], initial[1], steps, decoupled)
    x = np.linspace(x_start, x_end, steps + 1)
    return AmplitudeTrajectory(x, ts, rs, float(E))


def first_order_consistency(problem: Problem, E: float, y: float, dx: float) -> float:
    """Largest entry of ``T - I - Gamma(y) dx`` for slabs centred at ``y -+ dx/2``."""
    xj, xn = y - 0.5 * dx, y + 0.5 * dx
    kj, kn = wavenumber(problem, E, xj), wavenumber(problem, E, xn)
    T = local_transfer_matrix(kj / problem.m(xj), kn / problem.m(xn), kj, kn, y)
    G = gamma_matrix(problem, E, y)
    return float(np.max(np.abs(T - np.eye(2) - G * dx)))


def decoupled_closed_form(problem: Problem, E: float, x, branch: str = "rightward"):
    """Solution of one decoupled amplitude equation times its plane wave.

    ``rightward`` is ``t(x) exp(ikx) = sqrt(m*/k) exp(i theta(x))`` with
    theta measured from x_min; ``leftward`` the conjugate-phase branch.
    """
    return wkb_branch(problem, E, x, branch)


def _require_hard_wall(problem: Problem):
    if not isinstance(problem.boundary, HardWall):
        raise BoundaryKindError("operation requires a HardWall problem")


def _hard_wall_shot(problem: Problem, E, steps: int, keep: bool):
    E = np.asarray(E, dtype=float)
    k0 = wavenumber(problem, E, problem.x_min)
    t0 = np.exp(-1j * k0 * problem.x_min)
    r0 = -np.exp(1j * k0 * problem.x_min)
    t, r = _rk4(problem, E, problem.x_min, problem.x_max, t0, r0, steps, keep=keep)
    return k0, t, r


def boundary_mismatch(problem: Problem, E, steps: int = 2000):
    """``Re(psi(x_max) / u)`` for a hard-wall shot integrated with ``steps`` RK4 steps.

    ``u = i k(x_min) / |k(x_min)|`` is the constant phase of the shot.
    """
    _require_hard_wall(problem)
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    k0, t, r = _hard_wall_shot(problem, E_arr, steps, keep=False)
    kN = wavenumber(problem, E_arr, problem.x_max)
    psi = psi_from_amplitudes(t, r, kN, problem.x_max)
    out = (psi * np.conj(1j * k0 / np.abs(k0))).real
    return out if np.ndim(E) else float(out[0])


def eigenstate(problem: Problem, E: float, steps: int = 2000) -> Wavefunction:
    """Normalized hard-wall shot at energy ``E`` sampled on the integrator grid."""
    _require_hard_wall(problem)
    k0 = wavenumber(problem, E, problem.x_min)
    traj = integrate_coupled(problem, E, problem.x_min, problem.x_max,
                             AmplitudePair(np.exp(-1j * k0 * problem.x_min),
                                           -np.exp(1j * k0 * problem.x_min)), steps)
    return traj.wavefunction(problem)


def find_eigenvalues(problem: Problem, E_lo: float, E_hi: float, steps: int = 2000,
                     scan_points: int = 2000, tol: float = 1e-9) -> list[tuple[int, float]]:
    """Hard-wall levels from the coupled system; labels come from node counts.

    The whole domain must be classically allowed over the energy range.
    """
    _require_hard_wall(problem)
    if not E_lo < E_hi:
        raise ValueError("need E_lo < E_hi")

    def f(E):
        return boundary_mismatch(problem, E, steps)

    grid = np.linspace(E_lo, E_hi, scan_points)
    idx = scan_brackets(f(grid))
    roots = bisect_brackets(f, grid[idx], grid[idx + 1], tol)
    return [(eigenstate(problem, E, steps).count_nodes() + 1, float(E)) for E in roots]
