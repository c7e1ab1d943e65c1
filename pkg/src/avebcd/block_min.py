"""Exact minimization of the merit function over one coordinate pair.

Restricted to coordinates ``(i, j)`` the merit function is piecewise quadratic
in the new values ``(t1, t2)``, with one quadratic piece per sign region.
Each piece has a closed-form minimizer over the whole plane; when the 2x2
principal submatrix of ``A - I`` is positive definite exactly one of them lies
in its own region and it is the block minimizer.

The selection step does not rely on the region flags: it evaluates the
true (piecewise) objective at all four points and keeps the lowest.  This
keeps updates monotone even when rounding puts a candidate on the wrong
side of a sign boundary.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DegenerateBlock


class Region(enum.Enum):
    """Sign region of ``(t1, t2)``; P means ``>= 0`` and N means ``< 0``."""

    PP = (1, 1)
    PN = (1, -1)
    NP = (-1, 1)
    NN = (-1, -1)


REGION_ORDER = (Region.PP, Region.PN, Region.NP, Region.NN)


def _region_of(t1, t2):
    return Region((1 if t1 >= 0 else -1, 1 if t2 >= 0 else -1))


@dataclass(frozen=True)
class BlockContext:
    """Everything the pair update needs from ``A``, ``b`` and the iterate.

    ``w1 = (A x - b)_i`` and ``w2 = (A x - b)_j``.
    """

    i: int
    j: int
    a_ii: float
    a_jj: float
    a_ij: float
    w1: float
    w2: float
    x_i: float
    x_j: float


@dataclass(frozen=True)
class BlockCandidate:
    region: Region
    t1: float
    t2: float
    feasible: bool


@dataclass(frozen=True)
class BlockStep:
    """Selected update; ``alpha = t1 - x_i`` and ``beta = t2 - x_j``."""

    alpha: float
    beta: float
    region: Region
    t1: float
    t2: float
    delta_f: float


def make_context(problem, x, i, j, ax_minus_b=None) -> BlockContext:
    """Build the context for pair ``(i, j)`` at iterate ``x``.

    ``ax_minus_b`` may carry a precomputed ``A x - b`` to avoid a product.
    """
    if i == j:
        raise ValueError("block indices must differ")
    a = problem.a
    if ax_minus_b is None:
        w1 = float(a[i] @ x - problem.b[i])
        w2 = float(a[j] @ x - problem.b[j])
    else:
        w1 = float(ax_minus_b[i])
        w2 = float(ax_minus_b[j])
    return BlockContext(
        i=i, j=j,
        a_ii=float(a[i, i]), a_jj=float(a[j, j]), a_ij=float(a[i, j]),
        w1=w1, w2=w2, x_i=float(x[i]), x_j=float(x[j]),
    )


def _points(aii, ajj, aij, w1, w2, xi, xj):
    """The four region minimizers ``(t1, t2)`` in order PP, PN, NP, NN."""
    sq = aij * aij
    prod = aii * ajj

    den_pp = sq - (aii - 1.0) * (ajj - 1.0)
    den_pn = sq - (aii - 1.0) * (ajj + 1.0)
    den_np = sq - (aii + 1.0) * (ajj - 1.0)
    den_nn = sq - (aii + 1.0) * (ajj + 1.0)
    if den_pp == 0.0 or den_pn == 0.0 or den_np == 0.0 or den_nn == 0.0:
        raise DegenerateBlock("a region quadratic of the block is singular")

    # numerators shared between regions with the same sign in that coordinate
    num1_p = -w2 * aij + w1 * ajj - w1 + xj * aij + xi * (sq - prod + aii)
    num1_n = -w2 * aij + w1 * ajj + w1 - xj * aij + xi * (sq - prod - aii)
    num2_p = -w1 * aij + w2 * aii - w2 + xi * aij + xj * (sq - prod + ajj)
    num2_n = -w1 * aij + w2 * aii + w2 - xi * aij + xj * (sq - prod - ajj)

    return (
        (num1_p / den_pp, num2_p / den_pp),
        (num1_n / den_pn, num2_p / den_pn),
        (num1_p / den_np, num2_n / den_np),
        (num1_n / den_nn, num2_n / den_nn),
    )


def _delta(aii, ajj, aij, w1, w2, xi, xj, t1, t2):
    alpha = t1 - xi
    beta = t2 - xj
    quad = (alpha * alpha * aii + beta * beta * ajj + 2.0 * alpha * beta * aij
            + 2.0 * alpha * w1 + 2.0 * beta * w2)
    return quad - ((t1 * abs(t1) - xi * abs(xi)) + (t2 * abs(t2) - xj * abs(xj)))


def best_pair(aii, ajj, aij, w1, w2, xi, xj):
    """Float-only form of ``select(candidates(ctx), ctx)`` for solver inner loops.

    Returns:
        (t1, t2, region index into ``REGION_ORDER``, change in f)
    """
    best = None
    for k, (t1, t2) in enumerate(_points(aii, ajj, aij, w1, w2, xi, xj)):
        d = _delta(aii, ajj, aij, w1, w2, xi, xj, t1, t2)
        if best is None or d < best[3]:
            best = (t1, t2, k, d)
    return best


def candidates(ctx: BlockContext) -> list[BlockCandidate]:
    """Closed-form minimizers of the four region quadratics, in order PP, PN, NP, NN.

    Raises:
        DegenerateBlock: if a denominator ``a_ij^2 - (a_ii -+ 1)(a_jj -+ 1)`` is zero.
    """
    try:
        pts = _points(ctx.a_ii, ctx.a_jj, ctx.a_ij, ctx.w1, ctx.w2, ctx.x_i, ctx.x_j)
    except DegenerateBlock:
        raise DegenerateBlock(f"singular region quadratic on block ({ctx.i}, {ctx.j})") from None
    return [BlockCandidate(reg, t1, t2, _region_of(t1, t2) is reg)
            for reg, (t1, t2) in zip(REGION_ORDER, pts)]


def block_delta(ctx: BlockContext, t1: float, t2: float) -> float:
    """Exact change ``f(x + alpha e_i + beta e_j) - f(x)`` for new values ``(t1, t2)``."""
    return _delta(ctx.a_ii, ctx.a_jj, ctx.a_ij, ctx.w1, ctx.w2, ctx.x_i, ctx.x_j, t1, t2)


def select(cands, ctx: BlockContext) -> BlockStep:
    """Pick the candidate with the lowest true objective.

    Ties keep the earliest region in the order PP, PN, NP, NN.
    """
    best = None
    best_delta = 0.0
    for cand in cands:
        delta = block_delta(ctx, cand.t1, cand.t2)
        if best is None or delta < best_delta:
            best, best_delta = cand, delta
    return BlockStep(
        alpha=best.t1 - ctx.x_i,
        beta=best.t2 - ctx.x_j,
        region=best.region,
        t1=best.t1,
        t2=best.t2,
        delta_f=best_delta,
    )


def minimize_pair(problem, x, i, j, ax_minus_b=None) -> BlockStep:
    """Convenience wrapper: context, candidates and selection in one call."""
    ctx = make_context(problem, x, i, j, ax_minus_b)
    return select(candidates(ctx), ctx)


def minimize_single(a_ii: float, c: float) -> float:
    """Minimize ``phi(t) = a_ii t^2 - t|t| - 2 c t`` over a single coordinate.

    ``c = b_i - sum_{l != i} a_il x_l``.  For ``a_ii > 1`` the nonnegative piece
    is minimized at ``c / (a_ii - 1)`` and the negative one at ``c / (a_ii + 1)``;
    the sign of ``c`` decides which is feasible.
    """
    if not a_ii > 1.0:
        raise DegenerateBlock(f"single-coordinate curvature a_ii - 1 = {a_ii - 1.0} is not positive")
    if c >= 0.0:
        return c / (a_ii - 1.0)
    return c / (a_ii + 1.0)
