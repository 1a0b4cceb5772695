"""Slab transfer-matrix engine.

The domain is cut into N uniform slabs.  Inside slab j the mass and
potential are frozen at their values at the slab centre, and the
wavefunction is ``t_j exp(i k_j x) + r_j exp(-i k_j x)`` in absolute
coordinates.  Adjacent slabs are joined by continuity of psi and psi'/m*
(BenDaniel-Duke), which gives a 2x2 matrix per interface.

All arithmetic is complex, so forbidden slabs (imaginary k) need no special
casing.  Long products are kept finite by renormalizing and carrying the
logarithm of the scale separately.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Engine, HardWall, Problem, Scattering, Wavefunction, normalize
from .errors import (BoundaryKindError, DiscretizationError, NoPropagatingChannelError,
                     TurningPointError)
from .numerics import bisect_brackets, scan_brackets

logger = logging.getLogger(__name__)

__all__ = [
    "Slabbing",
    "AmplitudePair",
    "Propagation",
    "build_slabs",
    "local_transfer_matrix",
    "propagate",
    "hard_wall_start",
    "boundary_mismatch",
    "find_eigenvalues",
    "reconstruct_wavefunction",
    "evaluate",
    "eigenstate",
    "transmission",
    "total_transfer_matrix",
]

TURNING_POINT_GUARD = 1e-12  # eV
RENORM_EVERY = 64
_CHUNK_ELEMENTS = 400_000


@dataclass(frozen=True)
class Slabbing:
    x_min: float
    x_max: float
    centers: np.ndarray
    boundaries: np.ndarray
    mass: np.ndarray
    potential: np.ndarray

    @property
    def N(self) -> int:
        return self.centers.size

    @property
    def width(self) -> float:
        return (self.x_max - self.x_min) / self.N

    def owner(self, x) -> np.ndarray:
        """Index of the slab containing ``x`` (interfaces belong to the right slab)."""
        j = np.floor((np.asarray(x, dtype=float) - self.x_min) / self.width).astype(int)
        return np.clip(j, 0, self.N - 1)


class AmplitudePair(NamedTuple):
    t: complex
    r: complex


@dataclass(frozen=True)
class Propagation:
    """Amplitudes in every slab.

    The physical pair in slab j is ``(t[j], r[j]) * exp(log_scale[j])``.
    """

    energy: float
    t: np.ndarray
    r: np.ndarray
    log_scale: np.ndarray

    def pairs(self) -> list[AmplitudePair]:
        s = np.exp(self.log_scale)
        return [AmplitudePair(complex(t), complex(r)) for t, r in zip(self.t * s, self.r * s)]

    def relative(self) -> tuple[np.ndarray, np.ndarray]:
        """Amplitudes rescaled so the largest slab scale is one."""
        s = np.exp(self.log_scale - self.log_scale.max())
        return self.t * s, self.r * s


def build_slabs(problem: Problem, N: int) -> Slabbing:
    """Uniform slabbing with mass and potential sampled at the slab centres."""
    if N < 2:
        raise DiscretizationError(f"need at least 2 slabs, got {N}")
    edges = np.linspace(problem.x_min, problem.x_max, N + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return Slabbing(
        x_min=problem.x_min,
        x_max=problem.x_max,
        centers=centers,
        boundaries=edges[1:-1].copy(),
        mass=np.asarray(problem.m(centers), dtype=float),
        potential=np.asarray(problem.V(centers), dtype=float),
    )


def local_transfer_matrix(h_j, h_next, k_j, k_next, y) -> np.ndarray:
    """Matrix taking (t_j, r_j) to (t_{j+1}, r_{j+1}) across the interface at ``y``.

    ``h = k / m*`` on each side.  Broadcasts; the result has shape ``(..., 2, 2)``.
    Its determinant is ``h_j / h_next``.
    """
    h_j, h_next, k_j, k_next, y = np.broadcast_arrays(
        *(np.asarray(v, dtype=complex) for v in (h_j, h_next, k_j, k_next, y)))
    if np.any(k_next == 0) or np.any(h_next == 0):
        raise TurningPointError("zero wavenumber on the right of an interface")
    a, b, c, d = _entries(h_j / h_next, k_j, k_next, y)
    return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def _entries(rho, k_j, k_next, y):
    plus = 0.5 * (1 + rho)
    minus = 0.5 * (1 - rho)
    a = plus * np.exp(1j * (k_j - k_next) * y)
    b = minus * np.exp(-1j * (k_j + k_next) * y)
    c = minus * np.exp(1j * (k_j + k_next) * y)
    d = plus * np.exp(-1j * (k_j - k_next) * y)
    return a, b, c, d


def _slab_k(slabbing: Slabbing, E, C: float):
    """Wavenumbers and h = k/m* per slab, shape ``E.shape + (N,)``.

    Slabs sampled within TURNING_POINT_GUARD of E are nudged into the allowed
    side so no k vanishes.
    """
    E = np.asarray(E, dtype=float)[..., None]
    V = slabbing.potential
    diff = E - V
    diff = np.where(np.abs(diff) < TURNING_POINT_GUARD, TURNING_POINT_GUARD, diff)
    k = np.sqrt(slabbing.mass * diff / C + 0j)
    return k, k / slabbing.mass


def _chain_product(a, b, c, d):
    """Ordered product T_{L-1} ... T_1 T_0 along the last axis by pairwise reduction.

    Returns the four entries and the log of the factored-out scale.
    """
    log_s = np.zeros(a.shape)
    while a.shape[-1] > 1:
        if a.shape[-1] % 2:
            pad = [(0, 0)] * (a.ndim - 1) + [(0, 1)]
            a = np.pad(a, pad, constant_values=1)
            b = np.pad(b, pad)
            c = np.pad(c, pad)
            d = np.pad(d, pad, constant_values=1)
            log_s = np.pad(log_s, pad)
        a0, b0, c0, d0 = a[..., 0::2], b[..., 0::2], c[..., 0::2], d[..., 0::2]
        a1, b1, c1, d1 = a[..., 1::2], b[..., 1::2], c[..., 1::2], d[..., 1::2]
        a, b, c, d = (a1 * a0 + b1 * c0, a1 * b0 + b1 * d0,
                      c1 * a0 + d1 * c0, c1 * b0 + d1 * d0)
        log_s = log_s[..., 0::2] + log_s[..., 1::2]
        s = np.maximum(np.maximum(np.abs(a), np.abs(b)), np.maximum(np.abs(c), np.abs(d)))
        s = np.where(s > 0, s, 1.0)
        a, b, c, d = a / s, b / s, c / s, d / s
        log_s = log_s + np.log(s)
    return a[..., 0], b[..., 0], c[..., 0], d[..., 0], log_s[..., 0]


def total_transfer_matrix(k, h, y):
    """Product of all interface matrices for wavenumbers ``k[..., j]`` and interfaces ``y[j]``.

    Returns ``(M, log_scale)`` with the physical product ``M * exp(log_scale)``.
    """
    a, b, c, d = _entries(h[..., :-1] / h[..., 1:], k[..., :-1], k[..., 1:], y)
    a, b, c, d, log_s = _chain_product(a, b, c, d)
    M = np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)
    return M, log_s


def hard_wall_start(k0: complex, x_min: float) -> AmplitudePair:
    """Unit-modulus amplitudes giving psi(x_min) = 0 in the first slab."""
    return AmplitudePair(np.exp(-1j * k0 * x_min), -np.exp(1j * k0 * x_min))


def propagate(problem: Problem, E: float, slabbing: Slabbing, initial: AmplitudePair) -> Propagation:
    """Carry (t, r) from the first slab to the last."""
    t, r = complex(initial[0]), complex(initial[1])
    if t == 0 and r == 0:
        raise ValueError("initial amplitudes must not both vanish")
    k, h = _slab_k(slabbing, E, problem.C)
    a, b, c, d = (v.tolist() for v in _entries(h[:-1] / h[1:], k[:-1], k[1:], slabbing.boundaries))
    N = slabbing.N
    ts = [0j] * N
    rs = [0j] * N
    logs = [0.0] * N
    log_acc = 0.0
    ts[0], rs[0] = t, r
    for j in range(N - 1):
        t, r = a[j] * t + b[j] * r, c[j] * t + d[j] * r
        if (j + 1) % RENORM_EVERY == 0:
            s = max(abs(t), abs(r))
            if s > 0:
                t, r = t / s, r / s
                log_acc += np.log(s)
        ts[j + 1], rs[j + 1], logs[j + 1] = t, r, log_acc
    return Propagation(float(E), np.array(ts), np.array(rs), np.array(logs))


def _require_hard_wall(problem: Problem):
    if not isinstance(problem.boundary, HardWall):
        raise BoundaryKindError("operation requires a HardWall problem")


def boundary_mismatch(problem: Problem, E, N: int | Slabbing):
    """Signed real residual of psi(x_max) for a hard-wall shot from x_min.

    psi starts as ``exp(ik(x-x_min)) - exp(-ik(x-x_min))`` in the first slab,
    so it is real up to the constant phase ``u = i k_0 / |k_0|``; the
    returned value is ``Re(psi(x_max) / u)``.  Vectorized over ``E``.
    """
    _require_hard_wall(problem)
    slabbing = N if isinstance(N, Slabbing) else build_slabs(problem, N)
    E_arr = np.atleast_1d(np.asarray(E, dtype=float))
    out = np.empty(E_arr.shape)
    L = slabbing.N
    chunk = max(1, _CHUNK_ELEMENTS // L)
    for start in range(0, E_arr.size, chunk):
        Es = E_arr[start:start + chunk]
        k, h = _slab_k(slabbing, Es, problem.C)
        M, log_s = total_transfer_matrix(k, h, slabbing.boundaries)
        k0 = k[:, 0]
        t0 = np.exp(-1j * k0 * slabbing.x_min)
        r0 = -np.exp(1j * k0 * slabbing.x_min)
        tN = M[:, 0, 0] * t0 + M[:, 0, 1] * r0
        rN = M[:, 1, 0] * t0 + M[:, 1, 1] * r0
        kN = k[:, -1]
        psi = tN * np.exp(1j * kN * slabbing.x_max) + rN * np.exp(-1j * kN * slabbing.x_max)
        u = 1j * k0 / np.abs(k0)
        out[start:start + chunk] = (psi * np.conj(u)).real * np.exp(log_s)
    return out if np.ndim(E) else float(out[0])


def _center_values(problem: Problem, slabbing: Slabbing, prop: Propagation) -> np.ndarray:
    k, _ = _slab_k(slabbing, prop.energy, problem.C)
    t, r = prop.relative()
    x = slabbing.centers
    return t * np.exp(1j * k * x) + r * np.exp(-1j * k * x)


def _node_count(values: np.ndarray, forbidden: np.ndarray | None = None,
                rel_threshold: float = 1e-9) -> int:
    # a solution has at most one zero in a forbidden stretch, and next to a
    # hard wall that zero is the wall itself; any other sign change there is
    # the growing error of an imperfectly bisected energy
    if forbidden is not None and not forbidden.all():
        allowed = np.flatnonzero(~forbidden)
        values = values[allowed[0]:allowed[-1] + 1]
    peak = values[np.argmax(np.abs(values))]
    real = (values * np.conj(peak) / abs(peak)).real
    keep = np.abs(real) > rel_threshold * np.abs(real).max()
    s = np.sign(real[keep])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def find_eigenvalues(problem: Problem, E_lo: float, E_hi: float, N: int = 20000,
                     scan_points: int = 2000, tol: float = 1e-9) -> list[tuple[int, float]]:
    """Hard-wall eigenvalues in [E_lo, E_hi] as ``(n, E_n)`` pairs, n counted from 1.

    Roots of :func:`boundary_mismatch` are bracketed on a uniform energy scan
    and bisected to ``tol``.  Each level is labelled by the node count of its
    slab-centre wavefunction; scan order serves as a cross-check.
    """
    _require_hard_wall(problem)
    if not E_lo < E_hi:
        raise ValueError("need E_lo < E_hi")
    if scan_points < 2:
        raise ValueError("scan_points must be >= 2")
    if not tol > 0:
        raise ValueError("tol must be positive")
    slabbing = build_slabs(problem, N)

    def f(E):
        return boundary_mismatch(problem, E, slabbing)

    grid = np.linspace(E_lo, E_hi, scan_points)
    idx = scan_brackets(f(grid))
    roots = bisect_brackets(f, grid[idx], grid[idx + 1], tol)
    levels = []
    for i, E in enumerate(roots):
        k0 = _slab_k(slabbing, E, problem.C)[0][0]
        prop = propagate(problem, E, slabbing, hard_wall_start(k0, slabbing.x_min))
        n = _node_count(_center_values(problem, slabbing, prop), slabbing.potential > E) + 1
        if levels and n != levels[-1][0] + 1:
            logger.warning("node count %d at E=%.9g disagrees with scan order after n=%d",
                           n, E, levels[-1][0])
        levels.append((n, float(E)))
    return levels


def evaluate(problem: Problem, slabbing: Slabbing, prop: Propagation, x, side: str = "right"):
    """psi and psi'/m* at arbitrary points from the owning slab's plane waves.

    Amplitudes are taken relative to the largest slab scale.  With
    ``side="left"`` points sitting exactly on an interface use the slab to
    their left.
    """
    x = np.asarray(x, dtype=float)
    j = slabbing.owner(x)
    if side == "left":
        on_edge = np.isclose((x - slabbing.x_min) / slabbing.width, j, rtol=0, atol=1e-12)
        j = np.where(on_edge & (j > 0), j - 1, j)
    k, h = _slab_k(slabbing, prop.energy, problem.C)
    t, r = prop.relative()
    fwd = t[j] * np.exp(1j * k[j] * x)
    bwd = r[j] * np.exp(-1j * k[j] * x)
    return fwd + bwd, 1j * h[j] * (fwd - bwd)


def reconstruct_wavefunction(problem: Problem, E: float, slabbing: Slabbing, prop: Propagation,
                             points_per_slab: int = 8, normalized: bool = True) -> Wavefunction:
    """Sample psi on a uniform grid with ``points_per_slab`` intervals per slab."""
    if points_per_slab < 8:
        raise DiscretizationError("need at least 8 points per slab")
    grid = np.linspace(slabbing.x_min, slabbing.x_max, slabbing.N * points_per_slab + 1)
    psi, _ = evaluate(problem, slabbing, prop, grid)
    wf = Wavefunction(grid, psi, float(E), Engine.TMM)
    return normalize(wf) if normalized else wf


def eigenstate(problem: Problem, E: float, N: int = 20000, points_per_slab: int = 8) -> Wavefunction:
    """Normalized hard-wall state at energy ``E`` shot from x_min."""
    _require_hard_wall(problem)
    slabbing = build_slabs(problem, N)
    k0 = _slab_k(slabbing, E, problem.C)[0][0]
    prop = propagate(problem, E, slabbing, hard_wall_start(k0, slabbing.x_min))
    return reconstruct_wavefunction(problem, E, slabbing, prop, points_per_slab)


def transmission(problem: Problem, E: float, N: int) -> tuple[float, float]:
    """Transmission and reflection probabilities for a wave incident from the left lead."""
    if not isinstance(problem.boundary, Scattering):
        raise BoundaryKindError("transmission requires a Scattering problem")
    left, right = problem.boundary.left_lead, problem.boundary.right_lead
    for name, lead in (("left", left), ("right", right)):
        if not E > lead.potential:
            raise NoPropagatingChannelError(
                f"{name} lead has no propagating state at E={E:g} eV (V={lead.potential:g} eV)")
    slabbing = build_slabs(problem, N)
    k, h = _slab_k(slabbing, E, problem.C)
    kL = np.sqrt(left.mass * (E - left.potential) / problem.C)
    kR = np.sqrt(right.mass * (E - right.potential) / problem.C)
    hL, hR = kL / left.mass, kR / right.mass
    k_all = np.concatenate([[kL], k, [kR]]).astype(complex)
    h_all = np.concatenate([[hL], h, [hR]]).astype(complex)
    y_all = np.concatenate([[slabbing.x_min], slabbing.boundaries, [slabbing.x_max]])
    M, log_s = total_transfer_matrix(k_all, h_all, y_all)
    # det(M) telescopes to hL/hR exactly; using it avoids cancellation in thick barriers
    R = float(abs(M[1, 0] / M[1, 1]) ** 2)
    T = float(hL / hR * np.exp(-2 * log_s) / abs(M[1, 1]) ** 2)
    return T, R
