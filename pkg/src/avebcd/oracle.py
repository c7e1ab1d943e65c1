"""Brute-force references used to check the solvers.

``enumerate_solutions`` solves ``A x - |x| = b`` exactly for small ``n`` by
trying every sign pattern: on the orthant ``sign(x) = s`` the equation is the
linear system ``(A - diag(s)) x = b``.  ``grid_block_min`` minimizes the merit
function over a coordinate pair by grid search followed by an exact solve of
the quadratic piece the grid minimum lands in.  Neither routine uses the
closed forms in :mod:`avebcd.block_min`.
"""
from __future__ import annotations

import itertools

import numpy as np

from .errors import TooLarge

SIGN_TOL = 1e-12
DEDUP_TOL = 1e-9


def sign_patterns(n):
    """All ``2**n`` vectors in ``{-1, +1}**n`` as rows of an array."""
    return np.array(list(itertools.product((1.0, -1.0), repeat=n)))


def _consistent(x, s):
    return bool(np.all(np.where(s > 0, x >= -SIGN_TOL, x <= SIGN_TOL)))


def enumerate_solutions(problem, max_n=15):
    """Every solution of the AVE, found by sign-pattern enumeration.

    Patterns whose linear system is singular are skipped.  Solutions closer
    than ``1e-9`` to one already kept are dropped; the result is sorted
    lexicographically.

    Raises:
        TooLarge: if ``problem.n > max_n``.
    """
    n = problem.n
    if n > max_n:
        raise TooLarge(f"n = {n} exceeds max_n = {max_n} for sign enumeration")
    a = np.asarray(problem.a)
    b = np.asarray(problem.b)
    found = []
    for s in sign_patterns(n):
        mat = a - np.diag(s)
        try:
            x = np.linalg.solve(mat, b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if _consistent(x, s):
            found.append(x)
    found.sort(key=tuple)
    unique = []
    for x in found:
        if all(np.linalg.norm(x - u) > DEDUP_TOL for u in unique):
            unique.append(x)
    return unique


def _pair_objective(problem, x, i, j, alphas, betas):
    """f(x + alpha e_i + beta e_j) for arrays of steps, by direct evaluation."""
    a = np.asarray(problem.a)
    b = np.asarray(problem.b)
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    out = np.empty(alphas.shape)
    flat_a, flat_b, flat_o = alphas.ravel(), betas.ravel(), out.ravel()
    chunk = max(1, 2_000_000 // max(problem.n, 1))
    for lo in range(0, flat_a.size, chunk):
        hi = min(lo + chunk, flat_a.size)
        z = np.tile(x, (hi - lo, 1))
        z[:, i] += flat_a[lo:hi]
        z[:, j] += flat_b[lo:hi]
        flat_o[lo:hi] = np.sum((z @ a) * z - z * np.abs(z), axis=1) - 2.0 * (z @ b)
    return out


def _piece_minimizer(problem, x, i, j, s_i, s_j):
    """Stationary point of the quadratic piece with signs ``(s_i, s_j)``, in step coordinates."""
    a = np.asarray(problem.a)
    rest = np.asarray(x, dtype=float).copy()
    rest[[i, j]] = 0.0
    # d/dt of t^T M t - 2 c^T t with the other coordinates held fixed
    m = np.array([[a[i, i] - s_i, a[i, j]], [a[j, i], a[j, j] - s_j]])
    c = np.array([problem.b[i] - a[i] @ rest, problem.b[j] - a[j] @ rest])
    try:
        t = np.linalg.solve(m, c)
    except np.linalg.LinAlgError:
        return None
    return t[0] - x[i], t[1] - x[j]


def grid_block_min(problem, x, i, j, half_width=5.0, steps=1000):
    """Minimize ``f(x + alpha e_i + beta e_j)`` over a grid, then polish.

    The grid is ``[-half_width, half_width]**2`` with ``steps + 1`` points per
    axis.  The best grid point fixes a sign region (zero counts as
    nonnegative); the minimizer of that region's quadratic replaces it when
    it stays inside the region.  Neighbouring grid cells are tried as well,
    so a minimum sitting right next to a sign boundary is still polished.

    Returns:
        (alpha, beta)
    """
    if i == j:
        raise ValueError("block indices must differ")
    if steps < 100:
        raise ValueError("steps must be at least 100")
    x = np.asarray(x, dtype=float)
    axis = np.linspace(-half_width, half_width, steps + 1)
    al, be = np.meshgrid(axis, axis, indexing="ij")
    vals = _pair_objective(problem, x, i, j, al, be)
    k1, k2 = np.unravel_index(int(np.argmin(vals)), vals.shape)
    best = (float(axis[k1]), float(axis[k2]))
    best_val = float(vals[k1, k2])

    regions = set()
    for d1 in (-1, 0, 1):
        for d2 in (-1, 0, 1):
            p1 = min(max(k1 + d1, 0), steps)
            p2 = min(max(k2 + d2, 0), steps)
            regions.add((1.0 if x[i] + axis[p1] >= 0 else -1.0,
                         1.0 if x[j] + axis[p2] >= 0 else -1.0))
    for s_i, s_j in sorted(regions, reverse=True):
        step = _piece_minimizer(problem, x, i, j, s_i, s_j)
        if step is None:
            continue
        t_i, t_j = x[i] + step[0], x[j] + step[1]
        inside = ((t_i >= 0) == (s_i > 0)) and ((t_j >= 0) == (s_j > 0))
        if not inside:
            continue
        val = float(_pair_objective(problem, x, i, j, np.array([step[0]]), np.array([step[1]]))[0])
        if val <= best_val:
            best, best_val = (float(step[0]), float(step[1])), val
    return best
