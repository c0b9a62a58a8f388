"""Tilted stochastic matrices and their structure.

A *tilt* of a non-negative matrix ``A`` by a strictly positive vector ``u`` is
the row-normalized diagonal sandwich ``D^{-1}(Au) A D(u)``, which is always
row-stochastic and has the same zero pattern as ``A``.  This module provides
the tilt itself, stochastic certification, zero-pattern / irreducibility /
aperiodicity analysis, normalization of a product ``A_1 D(u_1) ... A_n D(u_n)``
into a single diagonal-times-stochastic factorization, and detection of a
tilt relation between two stochastic matrices.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    NegativeEntryError,
    NotSquareError,
    PatternMismatchError,
    RowSumError,
    ZeroRowError,
)
from .validation import (
    DEFAULT_TOL,
    as_matrix,
    as_positive_vector,
    pattern_threshold,
    readonly,
)


@dataclass(frozen=True)
class StochasticMatrix:
    """A rectangular matrix certified row-stochastic within ``tol``.

    Construct via :func:`validate_stochastic`; entries are non-negative and
    each row sums to 1 within the certification tolerance.
    """

    matrix: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        object.__setattr__(self, "matrix", readonly(self.matrix))

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.matrix if not copy else self.matrix.copy()
        return self.matrix.astype(dtype)


@dataclass(eq=False, frozen=True)
class ZeroPattern:
    """Boolean support mask of a matrix: True where an entry exceeds the threshold."""

    mask: np.ndarray

    def __post_init__(self):
        frozen = np.array(self.mask, dtype=bool, copy=True)
        frozen.setflags(write=False)
        object.__setattr__(self, "mask", frozen)

    @property
    def rows(self) -> int:
        return self.mask.shape[0]

    @property
    def cols(self) -> int:
        return self.mask.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZeroPattern):
            return NotImplemented
        return self.mask.shape == other.mask.shape and bool(
            np.array_equal(self.mask, other.mask)
        )

    def __hash__(self):
        return hash((self.mask.shape, self.mask.tobytes()))


@dataclass(frozen=True)
class TiltFactorization:
    """A product of non-negative factors written as diagonal times stochastic.

    ``scale`` is kept at unit max-norm and the factored-out magnitude lives in
    ``log_scale``, so long products stay representable.  The represented
    diagonal vector is ``scale * exp(log_scale)``.
    """

    scale: np.ndarray
    log_scale: float
    kernel: StochasticMatrix

    def __post_init__(self):
        object.__setattr__(self, "scale", readonly(self.scale))

    def scale_vector(self) -> np.ndarray:
        """Dense diagonal vector; may overflow for very long products."""
        return self.scale * math.exp(self.log_scale)

    def reconstruct(self) -> np.ndarray:
        """Dense ``D(scale_vector) @ kernel``, for comparison with the raw product."""
        return self.scale_vector()[:, None] * self.kernel.matrix


@dataclass(frozen=True)
class TiltDetection:
    """Outcome of a tilt-relation search between two stochastic matrices.

    ``factor`` is the max-normalized tilt vector when one exists, else None;
    ``reason`` is "ok", "support-disconnected", or "not-rank-1".
    """

    factor: np.ndarray | None
    reason: str

    def __post_init__(self):
        if self.factor is not None:
            object.__setattr__(self, "factor", readonly(self.factor))

    @property
    def found(self) -> bool:
        return self.factor is not None


def _dense(M) -> np.ndarray:
    return M.matrix if isinstance(M, StochasticMatrix) else as_matrix(M)


def validate_stochastic(M, tol: float = DEFAULT_TOL) -> StochasticMatrix:
    """Certify a matrix as row-stochastic within ``tol``.

    Entries in ``[-tol, 0)`` are treated as floating-point dust: they are
    clamped to zero and the affected row is renormalized.  Entries below
    ``-tol`` raise :class:`NegativeEntryError`; a row sum off by more than
    ``tol`` raises :class:`RowSumError`.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    arr = as_matrix(M)
    low = float(arr.min())
    if low < -tol:
        i, j = np.unravel_index(int(np.argmin(arr)), arr.shape)
        raise NegativeEntryError(f"entry ({i},{j}) = {arr[i, j]!r} is below -tol")
    row_sums = arr.sum(axis=1)
    dev = np.abs(row_sums - 1.0)
    if np.any(dev > tol):
        i = int(np.argmax(dev))
        raise RowSumError(f"row {i} sums to {row_sums[i]!r}, off by more than tol={tol}")
    if low < 0.0:
        arr = arr.copy()
        dusty = (arr < 0.0).any(axis=1)
        arr[arr < 0.0] = 0.0
        arr[dusty] /= arr[dusty].sum(axis=1, keepdims=True)
    return StochasticMatrix(arr, tol)


def tilt(A, u, tol: float = DEFAULT_TOL) -> StochasticMatrix:
    """Tilt a non-negative matrix by a strictly positive vector.

    Returns ``D^{-1}(Au) A D(u)``, the row normalization of ``A D(u)``.  Every
    row of ``A`` needs at least one strictly positive entry so that ``Au`` has
    no zero component.  The result is certified stochastic within ``tol`` and
    keeps the zero pattern of ``A`` exactly.
    """
    arr = _dense(A)
    uv = as_positive_vector(u, "u")
    if uv.shape[0] != arr.shape[1]:
        raise DimensionError(
            f"u has length {uv.shape[0]}, expected cols(A) = {arr.shape[1]}"
        )
    low = float(arr.min())
    if low < -tol:
        raise NegativeEntryError("A must be non-negative")
    if low < 0.0:
        arr = np.where(arr < 0.0, 0.0, arr)
    weights = arr @ uv
    if np.any(weights <= 0.0):
        i = int(np.argmin(weights))
        raise ZeroRowError(f"row {i} of A has no strictly positive entry")
    tilted = arr * uv[None, :] / weights[:, None]
    return validate_stochastic(tilted, tol)


def rank1_sandwich(y, A, x) -> np.ndarray:
    """Diagonal sandwich ``D(y) A D(x)``, the entrywise product ``(y x^T) o A``."""
    arr = _dense(A)
    yv = as_positive_vector(y, "y")
    xv = as_positive_vector(x, "x")
    if yv.shape[0] != arr.shape[0]:
        raise DimensionError(f"y has length {yv.shape[0]}, expected rows(A) = {arr.shape[0]}")
    if xv.shape[0] != arr.shape[1]:
        raise DimensionError(f"x has length {xv.shape[0]}, expected cols(A) = {arr.shape[1]}")
    return yv[:, None] * arr * xv[None, :]


def zero_pattern(M, threshold: float | None = None) -> ZeroPattern:
    """Support mask of ``M``: True where an entry is strictly above ``threshold``.

    With ``threshold=None`` a scale-relative cutoff (1e-14 times the largest
    absolute entry) separates structural zeros from floating-point dust.
    """
    arr = _dense(M)
    if threshold is None:
        threshold = pattern_threshold(arr)
    if threshold < 0.0:
        raise ValueError("threshold must be non-negative")
    return ZeroPattern(arr > threshold)


def _bfs_reaches_all(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    visited = np.zeros(n, dtype=bool)
    visited[0] = True
    frontier = visited.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~visited
        visited |= nxt
        frontier = nxt
    return bool(visited.all())


def is_irreducible(P: StochasticMatrix) -> bool:
    """True iff the positive-entry digraph of a square matrix is strongly connected."""
    arr = _dense(P)
    if arr.shape[0] != arr.shape[1]:
        raise NotSquareError(f"irreducibility needs a square matrix, got {arr.shape}")
    adj = zero_pattern(arr).mask
    return _bfs_reaches_all(adj) and _bfs_reaches_all(adj.T)


def is_aperiodic(P: StochasticMatrix) -> bool:
    """True iff the gcd of directed cycle lengths in the support graph is 1.

    Requires an irreducible matrix.  Breadth-first levels from state 0 give
    the period as gcd of ``level[i] + 1 - level[j]`` over all edges (i, j);
    tree edges contribute 0 and leave the gcd unchanged.
    """
    from .errors import NotIrreducibleError

    arr = _dense(P)
    if arr.shape[0] != arr.shape[1]:
        raise NotSquareError(f"aperiodicity needs a square matrix, got {arr.shape}")
    if not is_irreducible(P):
        raise NotIrreducibleError("aperiodicity is only defined for irreducible matrices")
    adj = zero_pattern(arr).mask
    n = arr.shape[0]
    level = np.full(n, -1, dtype=np.int64)
    level[0] = 0
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(adj[i]):
            if level[j] < 0:
                level[j] = level[i] + 1
                queue.append(int(j))
    g = 0
    rows, cols = np.nonzero(adj)
    for i, j in zip(rows, cols):
        g = math.gcd(g, abs(int(level[i]) + 1 - int(level[j])))
        if g == 1:
            return True
    return g == 1


def normalize_product(factors, tol: float = DEFAULT_TOL) -> TiltFactorization:
    """Write a product ``A_1 D(u_1) ... A_n D(u_n)`` as ``D(u) P`` with P stochastic.

    Built inductively: the base case is ``u = A_1 u_1`` with kernel
    ``tilt(A_1, u_1)``; each further factor multiplies the scale vector
    entrywise by ``P @ (A u_k)`` and extends the kernel by
    ``D^{-1}(P A u_k) P D(A u_k) @ tilt(A, u_k)``, a product of stochastic
    matrices.  The scale vector is renormalized to unit max-norm every step
    with the magnitude accumulated in ``log_scale``, so products with
    hundreds of factors stay representable.
    """
    pairs = list(factors)
    if not pairs:
        raise DimensionError("normalize_product needs at least one (A, u) factor")
    first_a = as_matrix(pairs[0][0], "A_1")
    if first_a.shape[0] != first_a.shape[1]:
        raise NotSquareError("normalize_product factors must be square")
    m = first_a.shape[0]

    log_scale = 0.0
    scale: np.ndarray | None = None
    kernel: StochasticMatrix | None = None
    for k, (a_k, u_k) in enumerate(pairs):
        arr = as_matrix(a_k, f"A_{k + 1}")
        if arr.shape != (m, m):
            raise DimensionError(
                f"factor {k + 1} has shape {arr.shape}, expected ({m}, {m})"
            )
        uv = as_positive_vector(u_k, f"u_{k + 1}")
        if uv.shape[0] != m:
            raise DimensionError(f"u_{k + 1} has length {uv.shape[0]}, expected {m}")
        step = tilt(arr, uv, tol)
        w_in = arr @ uv
        if kernel is None:
            scale = w_in
            kernel = step
        else:
            w = kernel.matrix @ w_in
            bridged = (kernel.matrix * w_in[None, :] / w[:, None]) @ step.matrix
            scale = scale * w
            kernel = validate_stochastic(bridged, tol)
        s = float(scale.max())
        scale = scale / s
        log_scale += math.log(s)
    return TiltFactorization(scale, log_scale, kernel)


def tilt_detect(P1, P2, tol: float = DEFAULT_TOL) -> TiltDetection:
    """Search for a positive u with ``P1 = tilt(P2, u)``.

    The entrywise ratio ``P1/P2`` over the common support must extend to a
    rank-1 positive matrix.  In log space that is an additive model
    ``log ratio = a_i + b_j``; the row offset of state 0 is pinned to 0 and
    the remaining offsets propagate along support edges breadth-first.  If
    the support graph leaves any offset unpinned the relation is undetermined
    and the search reports "support-disconnected"; if the reconstructed tilt
    does not match ``P1`` entrywise within ``tol`` it reports "not-rank-1".
    The returned factor is normalized so its largest component is 1.
    """
    a1 = _dense(P1)
    a2 = _dense(P2)
    if a1.shape != a2.shape:
        raise DimensionError(f"shapes {a1.shape} and {a2.shape} differ")
    if zero_pattern(a1) != zero_pattern(a2):
        raise PatternMismatchError("zero patterns differ, no tilt relation can hold")
    support = zero_pattern(a2).mask

    m, n = a2.shape
    row_off = np.full(m, np.nan)
    col_off = np.full(n, np.nan)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.where(support, np.log(a1) - np.log(a2), 0.0)
    row_off[0] = 0.0
    rows_todo: deque[int] = deque([0])
    cols_todo: deque[int] = deque()
    while rows_todo or cols_todo:
        while rows_todo:
            i = rows_todo.popleft()
            for j in np.flatnonzero(support[i]):
                if np.isnan(col_off[j]):
                    col_off[j] = log_ratio[i, j] - row_off[i]
                    cols_todo.append(int(j))
        while cols_todo:
            j = cols_todo.popleft()
            for i in np.flatnonzero(support[:, j]):
                if np.isnan(row_off[i]):
                    row_off[i] = log_ratio[i, j] - col_off[j]
                    rows_todo.append(int(i))
    if np.isnan(col_off).any() or np.isnan(row_off).any():
        return TiltDetection(None, "support-disconnected")

    u = np.exp(col_off)
    u /= u.max()
    candidate = tilt(a2, u, max(tol, DEFAULT_TOL))
    if float(np.abs(candidate.matrix - a1).max()) > tol:
        return TiltDetection(None, "not-rank-1")
    return TiltDetection(u, "ok")
