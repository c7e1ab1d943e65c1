"""Iterative solvers for ``A x - |x| = b``.

``solve_bcda``
    Monotone block coordinate descent.  Coordinates are grouped in pairs
    ``(0, 1), (2, 3), ...`` (plus a single trailing coordinate when ``n`` is
    odd) and each pair is minimized exactly, so the merit function never
    increases.
``solve_mgsm``
    The earlier Gauss-Seidel-like minimization scheme, which steps to the
    minimizer of a local quadratic model over the pair ``(i, i-1)``.  The
    model ignores the kinks of ``|x|``, so the merit function can go up and
    the iteration can cycle.

Both solvers keep ``r = A x - b`` up to date with O(n) work per update and
refresh it exactly once per sweep.
"""
from __future__ import annotations

import enum
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import block_min
from .errors import DegenerateBlock, DimensionMismatch, ZeroRhs
from .problem import validate


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_UPDATES = "MaxUpdates"
    DIVERGED = "Diverged"
    CYCLE_DETECTED = "CycleDetected"
    DEGENERATE_BLOCK = "DegenerateBlock"


CYCLE_TOL = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    """Run configuration shared by both solvers.

    Args:
        tol: stop once the relative residual is ``<= tol``.
        max_updates: cap on block (BCDA) or inner (MGSM) updates.
        x0: initial point; ``None`` means the zero vector.
        record_trace: keep an :class:`IterationRecord` per update.
        record_iterates: also store the iterate in each record (small n only).
        divergence_cap: give up once the relative residual exceeds this.
        cycle_window: MGSM only; compare each outer iterate with this many
            previous ones and stop on an exact repeat. 0 disables the check.
        res_check: BCDA only; ``"update"`` tests the residual after every
            block update, ``"sweep"`` only at the end of each sweep.
        mgsm_sign_at_zero: sign MGSM assigns to a zero coordinate when it
            builds the curvature matrix ``A - D(y)``; 1.0 puts zero in the
            nonnegative region, 0.0 uses ``sign(0) = 0``.
        certify: run the ``A - I`` SPD check and attach it to the report.
    """

    tol: float = 1e-6
    max_updates: int = 10**6
    x0: np.ndarray | None = None
    record_trace: bool = False
    record_iterates: bool = False
    divergence_cap: float = 1e12
    cycle_window: int = 0
    res_check: str = "update"
    mgsm_sign_at_zero: float = 1.0
    certify: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.divergence_cap > self.tol:
            raise ValueError("divergence_cap must exceed tol")
        if self.max_updates < 1:
            raise ValueError("max_updates must be positive")
        if self.cycle_window < 0:
            raise ValueError("cycle_window must be nonnegative")
        if self.res_check not in ("update", "sweep"):
            raise ValueError("res_check must be 'update' or 'sweep'")
        if self.mgsm_sign_at_zero not in (0.0, 1.0):
            raise ValueError("mgsm_sign_at_zero must be 0 or 1")


@dataclass(frozen=True)
class IterationRecord:
    update_index: int
    sweep_index: int
    f_value: float
    res: float
    x: tuple | None = None


@dataclass
class SolveReport:
    method: str
    status: Status
    x_final: np.ndarray
    it: int
    sweeps: int
    elapsed_seconds: float
    res_final: float
    trace: list | None = None
    certificate: object | None = None
    message: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED


def _start(problem, opts):
    bnorm = float(np.linalg.norm(problem.b))
    if bnorm == 0.0:
        raise ZeroRhs("relative residual is undefined for b = 0")
    if opts.x0 is None:
        x = np.zeros(problem.n)
    else:
        x = np.array(opts.x0, dtype=float).reshape(-1)
        if x.shape[0] != problem.n:
            raise DimensionMismatch(f"x0 has length {x.shape[0]}, expected {problem.n}")
    cert = validate(problem) if opts.certify else None
    return bnorm, x, cert


def _merit(x, r, b):
    # f = x^T A x - x^T|x| - 2 b^T x, with A x = r + b
    return float(x @ r - b @ x - x @ np.abs(x))


def _relres(x, r, bnorm):
    return float(np.linalg.norm(np.abs(x) - r)) / bnorm


class _Tracer:
    def __init__(self, opts, b, bnorm):
        self.on = opts.record_trace
        self.points = opts.record_iterates
        self.b = b
        self.bnorm = bnorm
        self.records = [] if self.on else None

    def __call__(self, update, sweep, x, r, res=None):
        if not self.on:
            return
        if res is None:
            res = _relres(x, r, self.bnorm)
        self.records.append(IterationRecord(
            update_index=update,
            sweep_index=sweep,
            f_value=_merit(x, r, self.b),
            res=res,
            x=tuple(float(v) for v in x) if self.points else None,
        ))


def _exact_res(a, b, x, bnorm):
    r = a @ x - b
    return r, _relres(x, r, bnorm)


def bcda_blocks(n):
    """Block schedule: consecutive pairs, then a single index if ``n`` is odd."""
    blocks = [(2 * s, 2 * s + 1) for s in range(n // 2)]
    if n % 2:
        blocks.append((n - 1,))
    return blocks


def solve_bcda(problem, opts: SolverOptions | None = None) -> SolveReport:
    """Monotone block coordinate descent with exact 2x2 block minimization.

    Blocks are visited in natural cyclic order.  ``it`` in the report counts
    block updates (a single trailing coordinate counts as one update).
    """
    opts = opts or SolverOptions()
    bnorm, x, cert = _start(problem, opts)
    a, b = problem.a, problem.b
    blocks = bcda_blocks(problem.n)
    per_update = opts.res_check == "update"
    trace = _Tracer(opts, b, bnorm)

    diag = [float(v) for v in np.diag(a)]
    buf = np.empty(problem.n)

    def relres():
        np.abs(x, out=buf)
        np.subtract(buf, r, out=buf)
        return float(np.sqrt(buf @ buf)) / bnorm

    t0 = time.perf_counter()
    r, res = _exact_res(a, b, x, bnorm)
    trace(0, 0, x, r, res)
    updates = sweeps = 0
    status = Status.CONVERGED if res <= opts.tol else None
    message = ""

    try:
        while status is None:
            if sweeps:
                r = a @ x - b
            sweeps += 1
            last = len(blocks) - 1
            for pos, blk in enumerate(blocks):
                if len(blk) == 2:
                    i, j = blk
                    xi, xj = float(x[i]), float(x[j])
                    try:
                        t1, t2, _, _ = block_min.best_pair(
                            diag[i], diag[j], float(a[i, j]), float(r[i]), float(r[j]), xi, xj)
                    except DegenerateBlock:
                        raise DegenerateBlock(f"singular region quadratic on block ({i}, {j})") from None
                    x[i] = t1
                    x[j] = t2
                    r += (t1 - xi) * a[i]
                    r += (t2 - xj) * a[j]
                else:
                    (i,) = blk
                    xi = float(x[i])
                    t = block_min.minimize_single(diag[i], diag[i] * xi - float(r[i]))
                    x[i] = t
                    r += (t - xi) * a[i]
                updates += 1

                if per_update or pos == last:
                    res = relres()
                    if res <= opts.tol:
                        # confirm against a fresh product before stopping
                        r, res = _exact_res(a, b, x, bnorm)
                    trace(updates, sweeps, x, r, res)
                    if res <= opts.tol:
                        status = Status.CONVERGED
                    elif not res <= opts.divergence_cap:
                        status = Status.DIVERGED
                else:
                    trace(updates, sweeps, x, r)
                if status is None and updates >= opts.max_updates:
                    status = Status.MAX_UPDATES
                if status is not None:
                    break
    except DegenerateBlock as exc:
        status = Status.DEGENERATE_BLOCK
        message = str(exc)
    elapsed = time.perf_counter() - t0

    _, res_final = _exact_res(a, b, x, bnorm)
    return SolveReport(
        method="bcda", status=status, x_final=x, it=updates, sweeps=sweeps,
        elapsed_seconds=elapsed, res_final=res_final, trace=trace.records,
        certificate=cert, message=message,
    )


def solve_mgsm(problem, opts: SolverOptions | None = None) -> SolveReport:
    """Baseline minimization method over the cyclic pairs ``(i, i-1)``.

    Each inner step minimizes the quadratic model with curvature
    ``C = A - D(y)`` over coordinates ``i`` and ``j = i - 1`` (``j = n - 1``
    for ``i = 0``).  The residual is tested after each outer iteration and
    ``it`` counts inner steps, i.e. ``k * n`` after ``k`` outer iterations.
    """
    opts = opts or SolverOptions()
    n = problem.n
    if n < 2:
        raise DimensionMismatch("MGSM needs n >= 2")
    bnorm, y, cert = _start(problem, opts)
    a, b = problem.a, problem.b
    zero_sign = float(opts.mgsm_sign_at_zero)
    trace = _Tracer(opts, b, bnorm)

    def sgn(v):
        if v > 0.0:
            return 1.0
        if v < 0.0:
            return -1.0
        return zero_sign

    t0 = time.perf_counter()
    r, res = _exact_res(a, b, y, bnorm)
    trace(0, 0, y, r, res)
    history = deque([y.copy()], maxlen=opts.cycle_window) if opts.cycle_window else None
    updates = outer = 0
    status = Status.CONVERGED if res <= opts.tol else None
    message = ""

    while status is None:
        if outer:
            r = a @ y - b
        outer += 1
        for i in range(n):
            j = i - 1 if i else n - 1
            yi, yj = float(y[i]), float(y[j])
            ca = float(a[i, i]) - sgn(yi)
            cd = float(a[j, j]) - sgn(yj)
            cc = float(a[i, j])
            p_i = float(r[i]) - abs(yi)
            p_j = float(r[j]) - abs(yj)
            den = ca * cd - cc * cc
            if den == 0.0:
                status = Status.DEGENERATE_BLOCK
                message = f"ad - c^2 = 0 on pair ({i}, {j})"
                break
            alpha = (cc * p_j - cd * p_i) / den
            beta = (cc * p_i - ca * p_j) / den
            y[i] = yi + alpha
            y[j] = yj + beta
            r += alpha * a[i]
            r += beta * a[j]
            updates += 1
            trace(updates, outer, y, r)
            if updates >= opts.max_updates and i < n - 1:
                status = Status.MAX_UPDATES
                break
        if status is not None:
            break

        r, res = _exact_res(a, b, y, bnorm)
        if res <= opts.tol:
            status = Status.CONVERGED
        elif not res <= opts.divergence_cap:
            status = Status.DIVERGED
        elif history is not None and any(np.max(np.abs(y - old)) <= CYCLE_TOL for old in history):
            status = Status.CYCLE_DETECTED
        elif updates >= opts.max_updates:
            status = Status.MAX_UPDATES
        if history is not None:
            history.append(y.copy())
    elapsed = time.perf_counter() - t0

    _, res_final = _exact_res(a, b, y, bnorm)
    return SolveReport(
        method="mgsm", status=status, x_final=y, it=updates, sweeps=outer,
        elapsed_seconds=elapsed, res_final=res_final, trace=trace.records,
        certificate=cert, message=message,
    )


METHODS = {"bcda": solve_bcda, "mgsm": solve_mgsm}


def solve(problem, method="bcda", opts=None) -> SolveReport:
    try:
        fn = METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}") from None
    return fn(problem, opts)


def verify_solution(problem, x, tol) -> bool:
    """True iff ``||A x - |x| - b|| <= tol * (1 + ||b||)``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionMismatch(f"point has shape {x.shape}, expected ({problem.n},)")
    resid = problem.a @ x - np.abs(x) - problem.b
    return bool(np.linalg.norm(resid) <= tol * (1.0 + np.linalg.norm(problem.b)))
