"""Bracketed root finding shared by the solvers."""
from __future__ import annotations

import math
from typing import Callable

from scipy.optimize import brentq

from .model import ConvergenceError

DUAL_WIDTH = 1e-10
DUAL_MAX_ITER = 200


def bisect_decreasing(
    fun: Callable[[float], float],
    target: float,
    lo: float = 0.0,
    hi: float | None = None,
    *,
    width: float = DUAL_WIDTH,
    max_iter: int = DUAL_MAX_ITER,
    grow: float = 2.0,
    max_grow: int = 200,
) -> float:
    """Solve ``fun(t) = target`` for a nonincreasing ``fun`` on ``[lo, hi]``.

    Returns ``lo`` when ``fun(lo) <= target``. When ``hi`` is omitted the
    bracket is grown geometrically until ``fun(hi) <= target``.
    """
    f_lo = fun(lo)
    if f_lo <= target:
        return lo
    if hi is None:
        hi = max(1.0, 2.0 * abs(lo))
        for _ in range(max_grow):
            f_hi = fun(hi)
            if f_hi <= target:
                break
            lo, f_lo, hi = hi, f_hi, hi * grow
        else:
            raise ConvergenceError("could not bracket the dual variable")
    else:
        f_hi = fun(hi)
        if f_hi > target:
            raise ConvergenceError(f"upper bracket {hi:g} does not bring demand below {target:g}")
    if f_hi == target:
        return hi
    if math.isfinite(f_lo):
        return brentq(lambda t: fun(t) - target, lo, hi, xtol=width * 1e-4 * max(1.0, hi), rtol=1e-13, maxiter=max_iter)
    # infinite demand at lo: plain bisection
    tol = width * max(1.0, hi)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if fun(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bracket_root(
    fun: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    grow: float = 2.0,
    max_grow: int = 400,
) -> tuple[float, float]:
    """Expand ``[lo, hi]`` (``lo > 0``) until ``fun`` changes sign from + to -."""
    f_lo = fun(lo)
    k = 0
    while f_lo <= 0:
        lo /= grow
        f_lo = fun(lo)
        k += 1
        if k > max_grow or lo == 0.0:
            raise ConvergenceError("lower bracket not found")
    k = 0
    f_hi = fun(hi)
    while f_hi > 0:
        hi *= grow
        f_hi = fun(hi)
        k += 1
        if k > max_grow or not math.isfinite(hi):
            raise ConvergenceError("upper bracket not found")
    return lo, hi


def root_decreasing(
    fun: Callable[[float], float],
    target: float,
    lo: float = 0.0,
    *,
    xtol: float = 1e-14,
    rtol: float = 1e-13,
    max_grow: int = 400,
) -> float:
    """Brent's method for a nonincreasing ``fun = target`` on ``[lo, inf)``.

    ``fun(lo)`` may be ``inf`` (free resources at zero price); the lower end
    of the bracket then moves to the right until it is finite.
    """
    f_lo = fun(lo)
    if f_lo <= target:
        return lo
    hi = max(1.0, 2.0 * abs(lo))
    for _ in range(max_grow):
        f_hi = fun(hi)
        if f_hi <= target:
            break
        lo, f_lo = hi, f_hi
        hi *= 2.0
    else:
        raise ConvergenceError("could not bracket the dual variable")
    if f_hi == target:
        return hi
    for _ in range(max_grow):
        if math.isfinite(f_lo):
            break
        mid = 0.5 * (lo + hi) if lo > 0 else hi * 2.0**-40
        f_mid = fun(mid)
        if f_mid <= target:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    else:
        raise ConvergenceError("demand stays infinite near the lower bracket")
    return brentq(lambda t: fun(t) - target, lo, hi, xtol=xtol, rtol=rtol, maxiter=500)
