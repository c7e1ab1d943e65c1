"""AVE instances: representation, SPD certification, generators and file I/O.

An instance of the absolute value equation ``A x - |x| = b`` is stored as an
:class:`AveProblem` holding a dense, exactly symmetric ``A`` and a right-hand
side ``b``.  Arrays are copied on construction and marked read-only so that a
problem can be shared freely between solver runs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
from scipy.linalg import lapack

from .errors import DimensionMismatch, NonSymmetric, ParseError


def _frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class AveProblem:
    """Absolute value equation ``A x - |x| = b`` with symmetric ``A``.

    Args:
        a (array): Square matrix of shape (n, n). Must be exactly symmetric.
        b (array): Right-hand side of length n.

    Raises:
        DimensionMismatch: if ``a`` is not square or ``b`` has the wrong length.
        NonSymmetric: if ``a[i, j] != a[j, i]`` for some pair.
    """

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _frozen(self.a)
        b = _frozen(self.b).reshape(-1)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"matrix must be square and non-empty, got shape {a.shape}")
        if b.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"rhs has length {b.shape[0]}, matrix has order {a.shape[0]}")
        if not np.array_equal(a, a.T):
            raise NonSymmetric(f"matrix is not symmetric (max |a - a^T| = {np.max(np.abs(a - a.T)):.3e})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __eq__(self, other):
        if not isinstance(other, AveProblem):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b)

    __hash__ = None


@dataclass(frozen=True)
class SpdCertificate:
    """Outcome of an attempted Cholesky factorization of ``A - I``.

    ``min_pivot`` is the smallest pivot ``l_kk**2`` produced before the
    factorization completed or stopped at the first non-positive pivot.
    """

    is_spd: bool
    min_pivot: float


def validate(problem: AveProblem) -> SpdCertificate:
    """Check whether ``A - I`` is symmetric positive definite.

    The test is a Cholesky factorization attempt; it fails at the first pivot
    that is not strictly positive.  The problem is not modified.
    """
    a = np.asarray(problem.a)
    if not np.array_equal(a, a.T):
        raise NonSymmetric("matrix is not symmetric")
    shifted = a - np.eye(problem.n)
    factor, info = lapack.dpotrf(shifted, lower=1, clean=1)
    if info == 0:
        return SpdCertificate(True, float(np.min(np.diag(factor) ** 2)))
    if info < 0:
        raise ValueError(f"dpotrf rejected argument {-info}")
    # leading (k-1) block factored fine; recompute the failing pivot from it
    k = info - 1
    if k == 0:
        return SpdCertificate(False, float(shifted[0, 0]))
    lead = np.linalg.cholesky(shifted[:k, :k])
    col = np.linalg.solve(lead, shifted[:k, k])
    pivot = float(shifted[k, k] - col @ col)
    pivots = np.append(np.diag(lead) ** 2, pivot)
    return SpdCertificate(False, float(np.min(pivots)))


# ---------------------------------------------------------------------------
# generators

def make_example41() -> AveProblem:
    """Two-variable instance with ``A - I`` SPD and solution ``[-2/19, 39/19]``."""
    return AveProblem(np.array([[1.5, 0.25], [0.25, 1.5]]), np.array([0.25, 1.0]))


def make_example43() -> AveProblem:
    """Two-variable instance with indefinite ``A - I`` and solution ``[2, 4]``."""
    return AveProblem(np.array([[1.0, 0.25], [0.25, 1.0]]), np.array([1.0, 0.5]))


def make_tridiag_example(n: int) -> AveProblem:
    """Tridiagonal benchmark: ``A = tridiag(3/4, 4, 3/4)``, ``b = [1/2, 1, 1/2, 1, ...]``.

    For odd ``n`` the pattern is truncated, so the last entry is 1/2.
    """
    if n < 1:
        raise ValueError("n must be positive")
    a = 4.0 * np.eye(n)
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 0.75
    a[idx + 1, idx] = 0.75
    b = np.where(np.arange(n) % 2 == 0, 0.5, 1.0)
    return AveProblem(a, b)


def make_random_spd(n: int, seed: int, margin: float = 0.1) -> AveProblem:
    """Random instance with ``lambda_min(A - I) >= margin``.

    ``A = I + M M^T / n + margin I`` with standard normal ``M`` and ``b``.
    Deterministic in ``(n, seed, margin)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if margin <= 0:
        raise ValueError("margin must be positive")
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n))
    a = (1.0 + margin) * np.eye(n) + (m @ m.T) / n
    a = 0.5 * (a + a.T)
    b = rng.standard_normal(n)
    return AveProblem(a, b)


GENERATORS = ("tridiag", "example41", "example43", "random-spd")


def generate(name: str, n: int | None = None, seed: int = 0, margin: float = 0.1) -> AveProblem:
    """Build a problem from a generator name (see ``GENERATORS``)."""
    if name == "tridiag":
        if n is None:
            raise ValueError("tridiag generator needs n")
        return make_tridiag_example(n)
    if name == "example41":
        return make_example41()
    if name == "example43":
        return make_example43()
    if name == "random-spd":
        if n is None:
            raise ValueError("random-spd generator needs n")
        return make_random_spd(n, seed, margin)
    raise ValueError(f"unknown generator {name!r}; choose from {', '.join(GENERATORS)}")


# ---------------------------------------------------------------------------
# file I/O

def read_vector(path) -> np.ndarray:
    """Read one real per line; blank lines and ``#`` comments are ignored."""
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: not a real number: {text!r}") from None
    return np.array(values, dtype=float)


def write_vector(path, x) -> None:
    """Write one value per line using the shortest round-trip representation."""
    with open(path, "w") as fh:
        for v in np.asarray(x, dtype=float):
            fh.write(repr(float(v)) + "\n")


def read_matrix(path) -> np.ndarray:
    """Read a dense real matrix from a Matrix Market file (array or coordinate)."""
    try:
        mat = scipy.io.mmread(str(path))
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ParseError(f"{path}: {exc}") from None
    if hasattr(mat, "toarray"):
        mat = mat.toarray()
    mat = np.asarray(mat)
    if np.iscomplexobj(mat):
        raise ParseError(f"{path}: complex matrices are not supported")
    return mat.astype(float)


def read_problem(matrix_path, rhs_path) -> AveProblem:
    """Assemble a problem from a Matrix Market matrix and a newline-delimited rhs.

    Raises:
        ParseError: malformed file.
        DimensionMismatch: rhs length differs from the matrix order.
        NonSymmetric: general-format matrix whose content is not symmetric.
    """
    a = read_matrix(matrix_path)
    b = read_vector(rhs_path)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{matrix_path}: matrix is {a.shape[0]}x{a.shape[1]}, expected square")
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"{rhs_path}: rhs has {b.shape[0]} entries, matrix has order {a.shape[0]}")
    return AveProblem(a, b)


def write_problem(problem: AveProblem, matrix_path, rhs_path) -> None:
    """Write ``A`` as a symmetric Matrix Market array and ``b`` one value per line."""
    # a file handle stops mmwrite from appending ".mtx" to the name
    with open(matrix_path, "wb") as fh:
        scipy.io.mmwrite(fh, np.asarray(problem.a), symmetry="symmetric", precision=17)
    write_vector(rhs_path, problem.b)
