"""Merit function, gradient and relative residual for ``A x - |x| = b``.

The merit function is

    f(x) = <Ax, x> - <|x|, x> - 2 <b, x>

whose gradient ``2 (A x - |x| - b)`` vanishes exactly at solutions of the
equation.  ``np.abs`` gives ``|0| = 0``, which matches ``sign(0) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, ZeroRhs


@dataclass(frozen=True)
class Evaluation:
    f_value: float
    res: float
    gradient: np.ndarray | None = None


def _as_point(problem, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionMismatch(f"point has shape {x.shape}, expected ({problem.n},)")
    return x


def eval_f(problem, x) -> float:
    """Return ``x^T A x - x^T |x| - 2 b^T x``."""
    x = _as_point(problem, x)
    return float(x @ (problem.a @ x) - x @ np.abs(x) - 2.0 * (problem.b @ x))


def eval_grad(problem, x) -> np.ndarray:
    """Return ``2 (A x - |x| - b)``."""
    x = _as_point(problem, x)
    return 2.0 * (problem.a @ x - np.abs(x) - problem.b)


def residual(problem, x) -> np.ndarray:
    """Return the unscaled residual ``b + |x| - A x``."""
    x = _as_point(problem, x)
    return problem.b + np.abs(x) - problem.a @ x


def eval_res(problem, x) -> float:
    """Relative residual ``||b + |x| - A x|| / ||b||`` (Euclidean norms).

    Raises:
        ZeroRhs: if ``b == 0``; use ``np.linalg.norm(residual(problem, x))`` instead.
    """
    bnorm = float(np.linalg.norm(problem.b))
    if bnorm == 0.0:
        raise ZeroRhs("relative residual is undefined for b = 0")
    return float(np.linalg.norm(residual(problem, x))) / bnorm


def evaluate(problem, x, gradient=False) -> Evaluation:
    """Bundle f, RES and optionally the gradient at ``x``."""
    return Evaluation(
        f_value=eval_f(problem, x),
        res=eval_res(problem, x),
        gradient=eval_grad(problem, x) if gradient else None,
    )
