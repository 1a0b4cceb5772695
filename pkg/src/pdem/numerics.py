"""Quadrature and root bracketing shared by the engines."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceError

__all__ = ["adaptive_simpson", "cumulative_simpson", "scan_brackets", "bisect_brackets", "find_roots", "log_slope"]


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 40) -> float:
    """Integrate a scalar function on [a, b] by adaptive Simpson's rule.

    Uses the usual ``|S2 - S1| <= 15 tol`` acceptance with Richardson
    correction.  Subintervals that hit ``max_depth`` are accepted as is.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4 * fm + fb) / 6
    # explicit stack instead of recursion: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, tol, 0)]
    total = 0.0
    while stack:
        a_, b_, fa_, fm_, fb_, s, eps, depth = stack.pop()
        m = 0.5 * (a_ + b_)
        lm, rm = 0.5 * (a_ + m), 0.5 * (m + b_)
        flm, frm = f(lm), f(rm)
        left = (m - a_) * (fa_ + 4 * flm + fm_) / 6
        right = (b_ - m) * (fm_ + 4 * frm + fb_) / 6
        delta = left + right - s
        if depth >= max_depth or abs(delta) <= 15 * eps:
            total += left + right + delta / 15
        else:
            stack.append((a_, m, fa_, flm, fm_, left, 0.5 * eps, depth + 1))
            stack.append((m, b_, fm_, frm, fb_, right, 0.5 * eps, depth + 1))
    return total


def cumulative_simpson(f: Callable[[float], float], grid: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Running integral of ``f`` from ``grid[0]`` to every grid point."""
    grid = np.asarray(grid, dtype=float)
    pieces = np.zeros(grid.size)
    per_piece = tol / max(grid.size - 1, 1)
    for i in range(1, grid.size):
        pieces[i] = adaptive_simpson(f, grid[i - 1], grid[i], per_piece)
    return np.cumsum(pieces)


def scan_brackets(values: np.ndarray) -> np.ndarray:
    """Indices ``i`` where ``values[i]`` and ``values[i+1]`` have opposite signs.

    An exact zero on the grid is attributed to the interval that starts at it.
    """
    s = np.sign(np.asarray(values, dtype=float))
    s_next = s[1:]
    s_here = s[:-1]
    return np.flatnonzero((s_here * s_next < 0) | ((s_here == 0) & (s_next != 0)))


def bisect_brackets(func: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray,
                    tol: float, max_iter: int = 200) -> np.ndarray:
    """Bisect many sign-change brackets at once.

    ``func`` maps an array of abscissae to an array of real values.  Every
    bracket is halved until its width drops below ``tol``.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    if lo.size == 0:
        return lo
    f_lo = np.asarray(func(lo), dtype=float)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        f_mid = np.asarray(func(mid), dtype=float)
        go_left = np.sign(f_mid) * np.sign(f_lo) <= 0
        hi = np.where(go_left, mid, hi)
        lo = np.where(go_left, lo, mid)
        f_lo = np.where(go_left, f_lo, f_mid)
    if np.all(hi - lo <= tol):
        return 0.5 * (lo + hi)
    raise ConvergenceError(f"bisection did not reach tol={tol:g} in {max_iter} iterations")


def find_roots(func: Callable[[np.ndarray], np.ndarray], x_lo: float, x_hi: float,
               scan_points: int, tol: float, max_iter: int = 200) -> np.ndarray:
    """All sign changes of ``func`` on a uniform scan of [x_lo, x_hi], bisected to ``tol``."""
    if not x_lo < x_hi:
        raise ValueError("need x_lo < x_hi")
    if scan_points < 2:
        raise ValueError("scan_points must be >= 2")
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = np.linspace(x_lo, x_hi, scan_points)
    vals = np.asarray(func(grid), dtype=float)
    idx = scan_brackets(vals)
    return bisect_brackets(func, grid[idx], grid[idx + 1], tol, max_iter)


def log_slope(xs, ys) -> float:
    """Least-squares slope of log(ys) against log(xs)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
