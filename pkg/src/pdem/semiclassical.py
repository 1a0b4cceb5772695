"""Extended WKB engine for position-dependent mass.

Phase bookkeeping: ``theta(x) = integral of k dx`` is dimensionless (k
already carries the 1/hbar), so the WKB branches are
``sqrt(m*/k) exp(+-i theta)`` and hard-wall quantization reads
``theta(x_max) = n pi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import Constant, Engine, Linear, Problem, Wavefunction, normalize, PhysicalConstants
from .errors import DomainError, SearchError, TopologyError
from .numerics import adaptive_simpson, cumulative_simpson, find_roots

__all__ = [
    "phase_integral",
    "phase_profile",
    "linear_well_energy",
    "hard_wall_quantize",
    "wkb_branch",
    "wkb_wavefunction",
    "wkb_state",
    "forbidden_interval",
    "wkb_exponent",
    "wkb_transmission",
    "piecewise_wkb_condition",
    "piecewise_wkb_bound_states",
    "piecewise_wkb_wavefunction",
    "EnvelopeFit",
    "envelope_fit",
]

QUAD_TOL = 1e-10
_DOMAIN_SAMPLES = 513


def _closed_form_ok(problem: Problem) -> bool:
    return isinstance(problem.mass, (Constant, Linear)) and isinstance(problem.potential, Constant)


def _theta_closed(problem: Problem, E: float, a: float, b: float) -> float:
    dE = E - problem.potential.value
    if dE < 0:
        raise DomainError(f"E={E:g} eV lies below the constant potential {problem.potential.value:g} eV")
    if isinstance(problem.mass, Linear) and problem.mass.slope != 0:
        ma, mb = problem.m(a), problem.m(b)
        return (2.0 / 3.0) * np.sqrt(dE / problem.C) * (mb**1.5 - ma**1.5) / problem.mass.slope
    return float(np.sqrt(problem.m(a) * dE / problem.C) * (b - a))


def _check_allowed(problem: Problem, E: float, a: float, b: float, strict: bool = False):
    xs = np.linspace(a, b, _DOMAIN_SAMPLES)
    dE = E - problem.V(xs[1:-1])
    dE = np.concatenate([[E - problem.V(a, "right")], dE, [E - problem.V(b, "left")]])
    bad = dE <= 0 if strict else dE < -1e-12
    if np.any(bad):
        x_bad = xs[np.argmax(bad)]
        raise DomainError(f"[{a:g}, {b:g}] nm is not classically allowed at E={E:g} eV "
                          f"(E - V < 0 near x={x_bad:g} nm)")


def _k_inside(problem: Problem, E: float, a: float, b: float):
    """Real k on [a, b] using one-sided profile limits at the end points."""
    C = problem.C

    def k(x):
        side = "left" if x >= b else "right"
        val = problem.m(x, side) * (E - problem.V(x, side)) / C
        return np.sqrt(val) if val > 0 else 0.0

    return k


def phase_integral(problem: Problem, E: float, x_from: float, x_to: float,
                   method: str = "auto", tol: float = QUAD_TOL) -> float:
    """Dimensionless phase ``integral_{x_from}^{x_to} k(x) dx`` over an allowed interval.

    ``method="auto"`` uses the closed form for a Constant or Linear mass with a
    Constant potential and adaptive Simpson quadrature otherwise;
    ``"quadrature"`` and ``"closed"`` force one route.
    """
    if x_to < x_from:
        return -phase_integral(problem, E, x_to, x_from, method, tol)
    if x_to == x_from:
        return 0.0
    _check_allowed(problem, E, x_from, x_to)
    if method == "closed" or (method == "auto" and _closed_form_ok(problem)):
        if not _closed_form_ok(problem):
            raise ValueError("closed form needs a Constant/Linear mass and a Constant potential")
        return _theta_closed(problem, E, x_from, x_to)
    if method not in ("auto", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    return adaptive_simpson(_k_inside(problem, E, x_from, x_to), x_from, x_to, tol)


def phase_profile(problem: Problem, E: float, grid: np.ndarray, method: str = "auto") -> np.ndarray:
    """theta(x) from ``grid[0]`` to every grid point."""
    grid = np.asarray(grid, dtype=float)
    _check_allowed(problem, E, grid[0], grid[-1])
    if method == "closed" or (method == "auto" and _closed_form_ok(problem)):
        return np.array([_theta_closed(problem, E, grid[0], x) for x in grid])
    return cumulative_simpson(_k_inside(problem, E, grid[0], grid[-1]), grid, QUAD_TOL)


def linear_well_energy(m1: float, m2: float, a: float, n: int,
                       constants: PhysicalConstants | None = None) -> float:
    """Closed-form WKB level of the infinite well on [-a, a] with a linear mass.

    ``m1`` is the mass at x = a and ``m2`` at x = -a (units of m0).  Equal
    masses fall back to the constant-mass well of width 2a.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (a > 0 and m1 > 0 and m2 > 0):
        raise ValueError("need a > 0 and positive masses")
    C = (constants or PhysicalConstants()).hbar2_over_2m0
    if np.isclose(m1, m2, rtol=1e-12, atol=0):
        return n**2 * np.pi**2 * C / (m1 * (2 * a) ** 2)
    return 9 * n**2 * np.pi**2 * C * (m1 - m2) ** 2 / (16 * a**2 * (m1**1.5 - m2**1.5) ** 2)


def _max_potential(problem: Problem) -> float:
    xs = np.linspace(problem.x_min, problem.x_max, 4097)
    return float(max(np.max(problem.V(xs)), problem.V(problem.x_max, "left")))


def hard_wall_quantize(problem: Problem, n: int, E_hint_range: tuple[float, float] | None = None,
                       method: str = "quadrature") -> float:
    """Energy at which the phase across the well equals ``n pi``.

    Root-finds ``theta(E) - n pi`` with Brent's method.  Without a hint the
    bracket starts at the top of the potential and doubles upward.
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def f(E):
        return phase_integral(problem, E, problem.x_min, problem.x_max, method) - n * np.pi

    if E_hint_range is not None:
        lo, hi = E_hint_range
        lo = max(lo, _max_potential(problem))
        if not lo < hi or f(lo) * f(hi) > 0:
            raise SearchError(f"n={n} level is not bracketed by {E_hint_range}")
    else:
        lo = _max_potential(problem)
        step = max(abs(lo), 1e-3)
        hi = lo + step
        while f(hi) < 0:
            step *= 2
            hi = lo + step
            if step > 1e6:
                raise SearchError(f"could not bracket level n={n}")
    return float(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))


def wkb_branch(problem: Problem, E: float, x, branch: str = "rightward"):
    """Decoupled branch ``sqrt(m*/k) exp(+-i theta(x))`` with theta measured from x_min."""
    if branch not in ("rightward", "leftward"):
        raise ValueError("branch must be 'rightward' or 'leftward'")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(E - problem.V(xs) <= 0):
        raise DomainError("WKB branch requested in a forbidden region or at a turning point")
    order = np.argsort(xs)
    grid = np.concatenate([[problem.x_min], xs[order]])
    theta_sorted = phase_profile(problem, E, grid)[1:]
    theta = np.empty_like(xs)
    theta[order] = theta_sorted
    k = np.sqrt(problem.m(xs) * (E - problem.V(xs)) / problem.C)
    sign = 1 if branch == "rightward" else -1
    out = np.sqrt(problem.m(xs) / k) * np.exp(sign * 1j * theta)
    return out if np.ndim(x) else complex(out[0])


def wkb_wavefunction(problem: Problem, E: float, c1: complex, c2: complex,
                     points: int = 2048, normalized: bool = False) -> Wavefunction:
    """``sqrt(m*/k) (c1 exp(i theta) + c2 exp(-i theta))`` on a uniform grid.

    ``c1 = -c2 = c / 2i`` gives the standing wave ``c sqrt(m*/k) sin(theta)``.
    """
    grid = np.linspace(problem.x_min, problem.x_max, points)
    _check_allowed(problem, E, problem.x_min, problem.x_max, strict=True)
    theta = phase_profile(problem, E, grid)
    m = problem.m(grid)
    k = np.sqrt(m * (E - problem.V(grid)) / problem.C)
    psi = np.sqrt(m / k) * (c1 * np.exp(1j * theta) + c2 * np.exp(-1j * theta))
    wf = Wavefunction(grid, psi, float(E), Engine.WKB)
    return normalize(wf) if normalized else wf


def wkb_state(problem: Problem, n: int, points: int = 2048) -> Wavefunction:
    """Normalized n-th hard-wall WKB standing wave at its quantized energy."""
    E = hard_wall_quantize(problem, n)
    half = 1 / 2j
    return wkb_wavefunction(problem, E, half, -half, points, normalized=True)


# --------------------------------------------------------------------------
# Tunneling
# --------------------------------------------------------------------------

def forbidden_interval(problem: Problem, E: float, scan_points: int = 2001):
    """The single region of the domain where E < V(x), or ``None`` if there is none.

    End points in the interior are bisected to 1e-10 nm and reported on the
    forbidden side.
    """
    xs = np.linspace(problem.x_min, problem.x_max, scan_points)
    forb = (E - problem.V(xs)) < 0
    if not forb.any():
        return None
    edges = np.flatnonzero(np.diff(forb.astype(int)))
    starts = [0] if forb[0] else []
    starts += [i + 1 for i in edges if not forb[i]]
    if len(starts) > 1:
        raise TopologyError(f"{len(starts)} forbidden intervals at E={E:g} eV; only one is supported")
    i0 = starts[0]
    ends = [i for i in edges if forb[i]]
    i1 = ends[0] if ends else scan_points - 1

    def f(x):
        return E - problem.V(x)

    if i0 == 0:
        xa = problem.x_min
    else:
        lo, hi = xs[i0 - 1], xs[i0]
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            lo, hi = (lo, mid) if f(mid) < 0 else (mid, hi)
        xa = hi
    if i1 == scan_points - 1:
        xb = problem.x_max
    else:
        lo, hi = xs[i1], xs[i1 + 1]
        while hi - lo > 1e-10:
            mid = 0.5 * (lo + hi)
            lo, hi = (mid, hi) if f(mid) < 0 else (lo, mid)
        xb = lo
    return xa, xb


def wkb_exponent(problem: Problem, E: float, scan_points: int = 2001) -> float:
    """``2 integral kappa dx`` over the forbidden interval (zero if there is none)."""
    interval = forbidden_interval(problem, E, scan_points)
    if interval is None:
        return 0.0
    xa, xb = interval
    C = problem.C

    def kappa(x):
        side = "left" if x >= xb else "right"
        val = problem.m(x, side) * (problem.V(x, side) - E) / C
        return np.sqrt(val) if val > 0 else 0.0

    return 2 * adaptive_simpson(kappa, xa, xb, QUAD_TOL)


def wkb_transmission(problem: Problem, E: float, scan_points: int = 2001) -> float:
    """Barrier penetration estimate ``exp(-2 integral kappa dx)``."""
    return float(np.exp(-wkb_exponent(problem, E, scan_points)))


# --------------------------------------------------------------------------
# Piecewise WKB for wells with sharp interfaces
# --------------------------------------------------------------------------

def _flux_ratio(problem: Problem, E: float, x: float, side: str) -> tuple[float, bool]:
    """|k|/m* at one side of an interface and whether the point is allowed."""
    m = problem.m(x, side)
    dE = E - problem.V(x, side)
    return float(np.sqrt(abs(m * dE) / problem.C) / m), dE > 0


def piecewise_wkb_condition(problem: Problem, E: float, A1: float, A2: float) -> float:
    """Matching determinant for a well with interfaces at A1 < A2.

    Region II (A1, A2) carries both branches; regions I and III carry the
    branch that decays away from the well.  psi and psi'/m* are matched at
    both interfaces, with psi'/m* = i (k/m*) (forward - backward) in every
    region.  The determinant is purely imaginary; its imaginary part is
    returned.
    """
    q1, allowed1 = _flux_ratio(problem, E, A1, "left")
    q2, allowed2 = _flux_ratio(problem, E, A2, "right")
    h1, inside1 = _flux_ratio(problem, E, A1, "right")
    h2, inside2 = _flux_ratio(problem, E, A2, "left")
    if allowed1 or allowed2:
        raise DomainError(f"E={E:g} eV is not below the barrier on both sides")
    if not (inside1 and inside2):
        raise DomainError(f"E={E:g} eV is not above the well bottom at both interfaces")
    theta = phase_integral(problem, E, A1, A2)
    Z = (1j * h1 - q1) * (q2 - 1j * h2)
    return float((Z * np.exp(-1j * theta)).imag)


def _well_energy_window(problem: Problem, A1: float, A2: float) -> tuple[float, float]:
    xs = np.linspace(A1, A2, 2049)[1:-1]
    bottom = max(float(np.max(problem.V(xs))), problem.V(A1, "right"), problem.V(A2, "left"))
    top = min(problem.V(A1, "left"), problem.V(A2, "right"))
    return bottom, top


def piecewise_wkb_bound_states(problem: Problem, A1: float, A2: float,
                               E_range: tuple[float, float] | None = None,
                               scan_points: int = 2000, tol: float = 1e-9) -> list[float]:
    """Bound-state energies of a sharp-interface well from piecewise WKB."""
    bottom, top = _well_energy_window(problem, A1, A2)
    lo, hi = (bottom, top) if E_range is None else E_range
    pad = 1e-9 * max(1.0, abs(top - bottom))
    lo, hi = max(lo, bottom + pad), min(hi, top - pad)
    if not lo < hi:
        return []
    f = np.vectorize(lambda E: piecewise_wkb_condition(problem, E, A1, A2))
    return [float(E) for E in find_roots(f, lo, hi, scan_points, tol)]


def piecewise_wkb_wavefunction(problem: Problem, E: float, A1: float, A2: float,
                               points: int = 2048, normalized: bool = True) -> Wavefunction:
    """Piecewise WKB state on [x_min, x_max] for the interfaces A1 < A2."""
    q1, _ = _flux_ratio(problem, E, A1, "left")
    h1, _ = _flux_ratio(problem, E, A1, "right")
    c1 = 1.0
    c2 = c1 * (1j * h1 - q1) / (1j * h1 + q1)
    grid = np.linspace(problem.x_min, problem.x_max, points)
    psi = np.zeros(points, dtype=complex)
    C = problem.C

    inner = (grid > A1) & (grid < A2)
    x_in = np.concatenate([[A1], grid[inner], [A2]])
    theta = cumulative_simpson(_k_inside(problem, E, A1, A2), x_in, QUAD_TOL)
    sides = ["right"] + ["right"] * int(inner.sum()) + ["left"]
    m_in = np.array([problem.m(x, s) for x, s in zip(x_in, sides)])
    k_in = np.sqrt(m_in * (E - np.array([problem.V(x, s) for x, s in zip(x_in, sides)])) / C)
    psi_in = np.sqrt(m_in / k_in) * (c1 * np.exp(1j * theta) + c2 * np.exp(-1j * theta))
    psi[inner] = psi_in[1:-1]
    psi_A1, psi_A2 = psi_in[0], psi_in[-1]

    def kappa(x, side="right"):
        val = problem.m(x, side) * (problem.V(x, side) - E) / C
        return np.sqrt(val) if val > 0 else 0.0

    def envelope(x, side="right"):
        return np.sqrt(problem.m(x, side) / kappa(x, side))

    left = grid <= A1
    if left.any():
        x_l = grid[left][::-1]
        # running integral from A1 down to x is already negative
        decay = cumulative_simpson(lambda x: kappa(x, "left"), np.concatenate([[A1], x_l]))[1:]
        env = np.array([envelope(x, "left") for x in x_l])
        psi[np.flatnonzero(left)[::-1]] = psi_A1 * env / envelope(A1, "left") * np.exp(decay)
    right = grid >= A2
    if right.any():
        x_r = grid[right]
        decay = -cumulative_simpson(kappa, np.concatenate([[A2], x_r]))[1:]
        env = np.array([envelope(x) for x in x_r])
        psi[right] = psi_A2 * env / envelope(A2) * np.exp(decay)
    wf = Wavefunction(grid, psi, float(E), Engine.WKB)
    return normalize(wf) if normalized else wf


# --------------------------------------------------------------------------
# Envelope of |psi|^2
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EnvelopeFit:
    scale: float
    peak_x: np.ndarray
    peak_height: np.ndarray
    residual: float

    def __call__(self, problem: Problem, x):
        return self.scale * np.sqrt(problem.m(x))


def envelope_fit(wf: Wavefunction, problem: Problem) -> EnvelopeFit:
    """Least-squares fit of ``c sqrt(m*(x))`` to the local maxima of |psi|^2.

    ``residual`` is ``||peaks - fit|| / ||peaks||``.
    """
    d = wf.density
    i = np.flatnonzero((d[1:-1] > d[:-2]) & (d[1:-1] >= d[2:])) + 1
    if i.size == 0:
        raise ValueError("no interior maxima in |psi|^2")
    x, p = wf.grid[i], d[i]
    s = np.sqrt(problem.m(x))
    c = float(p @ s / (s @ s))
    resid = float(np.linalg.norm(p - c * s) / np.linalg.norm(p))
    return EnvelopeFit(c, x, p, resid)

