"""Stationary distributions, detailed balance, and reversible-chain tools.

A square stochastic matrix ``P`` with stationary distribution ``mu`` is
reversible when ``mu[i] P[i,j] == mu[j] P[j,i]`` for all pairs.  Tilting a
reversible kernel keeps it reversible and the new stationary distribution has
a closed form, as does the stationary distribution of a product of two tilts
of the same kernel.  This module computes those closed forms, measures the
detailed-balance defect, symmetrizes reversible kernels (the similarity that
makes their spectra real), and generates random reversible test chains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import StochasticMatrix, is_irreducible, tilt, validate_stochastic
from .errors import (
    ConvergenceError,
    DimensionError,
    NotIrreducibleError,
    NotReversibleError,
    ZeroStationaryError,
)
from .validation import (
    DEFAULT_TOL,
    as_positive_vector,
    as_square_matrix,
    as_vector,
    readonly,
)

_POWER_MAX_ITER = 100_000


@dataclass(frozen=True)
class ReversibleChain:
    """A square stochastic kernel with its stationary distribution and defect.

    ``defect`` is the detailed-balance certificate
    ``max_{i,j} |mu[i] P[i,j] - mu[j] P[j,i]|``; zero means exactly reversible.
    """

    kernel: StochasticMatrix
    stationary: np.ndarray
    defect: float

    def __post_init__(self):
        object.__setattr__(self, "stationary", readonly(self.stationary))

    @property
    def n_states(self) -> int:
        return self.kernel.rows

    @classmethod
    def from_kernel(cls, P, tol: float = DEFAULT_TOL) -> "ReversibleChain":
        """Bundle a kernel with its computed stationary vector and defect.

        Does not require the kernel to be reversible; the defect field simply
        records how far from detailed balance it is.
        """
        sm = P if isinstance(P, StochasticMatrix) else validate_stochastic(P, tol)
        mu = stationary_distribution(sm, tol)
        return cls(sm, mu, reversibility_defect(sm, mu))

    def require_reversible(self, tol: float) -> None:
        if self.defect > tol:
            raise NotReversibleError(
                f"detailed-balance defect {self.defect!r} exceeds tolerance {tol!r}"
            )


def stationary_distribution(P, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Stationary distribution of an irreducible square stochastic matrix.

    Solves ``(P^T - I) mu = 0`` with the last equation replaced by the
    normalization ``sum(mu) = 1`` via partially pivoted elimination.  If the
    solve is ill-conditioned or leaves a residual above ``tol``, falls back to
    power iteration on the half-lazy transpose ``(P^T + I)/2``, whose fixed
    point is the same and which converges even for periodic chains.
    """
    arr = P.matrix if isinstance(P, StochasticMatrix) else as_square_matrix(P, "P")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"stationary distribution needs a square matrix, got {arr.shape}")
    if not is_irreducible(arr):
        raise NotIrreducibleError("matrix is not irreducible; stationary distribution is not unique")
    n = arr.shape[0]
    if n == 1:
        return readonly(np.array([1.0]))

    system = arr.T - np.eye(n)
    system[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    mu = None
    try:
        candidate = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        candidate = None
    if candidate is not None and candidate.min() > 0.0:
        candidate /= candidate.sum()
        if _stationary_residual(arr, candidate) <= tol:
            mu = candidate

    if mu is None:
        mu = _power_iteration_stationary(arr, tol)
    return readonly(mu)


def _stationary_residual(arr: np.ndarray, mu: np.ndarray) -> float:
    return float(np.abs(mu @ arr - mu).max())


def _power_iteration_stationary(arr: np.ndarray, tol: float) -> np.ndarray:
    n = arr.shape[0]
    lazy = 0.5 * (arr.T + np.eye(n))
    x = np.full(n, 1.0 / n)
    for _ in range(_POWER_MAX_ITER):
        y = lazy @ x
        y /= y.sum()
        if np.abs(y - x).max() <= 1e-16:
            x = y
            break
        x = y
    if x.min() <= 0.0 or _stationary_residual(arr, x) > tol:
        raise ConvergenceError(
            f"power iteration residual {_stationary_residual(arr, x)!r} above tol={tol!r}"
        )
    return x


def reversibility_defect(P, mu) -> float:
    """Detailed-balance defect ``max_{i,j} |mu[i] P[i,j] - mu[j] P[j,i]|``."""
    arr = P.matrix if isinstance(P, StochasticMatrix) else as_square_matrix(P, "P")
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"reversibility needs a square matrix, got {arr.shape}")
    muv = as_vector(mu, "mu")
    if muv.shape[0] != arr.shape[0]:
        raise DimensionError(
            f"mu has length {muv.shape[0]}, expected {arr.shape[0]}"
        )
    flow = muv[:, None] * arr
    return float(np.abs(flow - flow.T).max())


def tilted_stationary(
    chain: ReversibleChain, u, tol: float = DEFAULT_TOL
) -> tuple[StochasticMatrix, np.ndarray]:
    """Tilt a reversible kernel and return the tilt with its stationary vector.

    For reversible ``(P, mu)`` the tilt ``U = tilt(P, u)`` is again reversible
    and its stationary distribution is the normalization of
    ``u o (P u) o mu`` (entrywise products).  No eigenproblem is solved; the
    closed form is exact up to rounding.
    """
    chain.require_reversible(tol)
    P = chain.kernel.matrix
    uv = as_positive_vector(u, "u")
    if uv.shape[0] != chain.n_states:
        raise DimensionError(f"u has length {uv.shape[0]}, expected {chain.n_states}")
    tilted = tilt(P, uv, tol)
    mu_u = uv * (P @ uv) * chain.stationary
    mu_u /= mu_u.sum()
    return tilted, readonly(mu_u)


def two_tilt_product(
    chain: ReversibleChain, u, v, tol: float = DEFAULT_TOL
) -> tuple[StochasticMatrix, np.ndarray]:
    """Product of two tilts of one reversible kernel, with stationary vector.

    Returns ``W = tilt(P, u) @ tilt(P, v)`` and the normalization of
    ``(P u) o mu o v``, which is stationary for ``W``.  ``W`` is similar to a
    positive semi-definite matrix, so its spectrum must be real and
    non-negative; that is verified here with the general eigensolver and a
    1e-9 tolerance, since it is what downstream bounds rely on.
    """
    from .spectral import general_spectrum

    chain.require_reversible(tol)
    P = chain.kernel.matrix
    uv = as_positive_vector(u, "u")
    vv = as_positive_vector(v, "v")
    for name, vec in (("u", uv), ("v", vv)):
        if vec.shape[0] != chain.n_states:
            raise DimensionError(f"{name} has length {vec.shape[0]}, expected {chain.n_states}")
    first = tilt(P, uv, tol)
    second = tilt(P, vv, tol)
    product = validate_stochastic(first.matrix @ second.matrix, tol)
    mu_w = (P @ uv) * chain.stationary * vv
    mu_w /= mu_w.sum()

    spectrum = general_spectrum(product.matrix).eigenvalues
    if np.abs(spectrum.imag).max() > 1e-9 or spectrum.real.min() < -1e-9:
        raise NotReversibleError(
            "two-tilt product has a complex or negative eigenvalue; "
            "the input chain is too far from detailed balance"
        )
    return product, readonly(mu_w)


def symmetrize(chain: ReversibleChain, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Similar symmetric form ``D^{1/2}(mu) P D^{-1/2}(mu)`` of a reversible kernel.

    The entries are ``sqrt(mu[i]/mu[j]) P[i,j]``; detailed balance makes this
    symmetric, so the kernel's eigenvalues are real.
    """
    chain.require_reversible(tol)
    mu = chain.stationary
    if mu.min() <= 0.0:
        worst = int(np.argmin(mu))
        raise ZeroStationaryError(f"stationary component {worst} is {mu[worst]!r}")
    root = np.sqrt(mu)
    return root[:, None] * chain.kernel.matrix / root[None, :]


def random_reversible(m: int, seed: int, sparsity: float = 0.0) -> ReversibleChain:
    """Random reversible, irreducible, aperiodic chain on ``m`` states.

    Draws a symmetric non-negative weight matrix and row-normalizes it; the
    stationary distribution is then proportional to the row sums and detailed
    balance holds by construction.  The diagonal is kept strictly positive
    (aperiodicity) and, when ``sparsity > 0``, off-diagonal weights below that
    quantile are zeroed except along a random spanning tree, which preserves
    irreducibility.  Deterministic for a given ``(m, seed, sparsity)``.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if not 0.0 <= sparsity < 1.0:
        raise ValueError(f"sparsity must be in [0, 1), got {sparsity}")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(size=(m, m))
    weights = 0.5 * (weights + weights.T)
    weights[np.diag_indices(m)] = rng.uniform(0.5, 1.5, size=m)

    if sparsity > 0.0 and m > 1:
        order = rng.permutation(m)
        tree = set()
        for k in range(1, m):
            a = int(order[k])
            b = int(order[rng.integers(0, k)])
            tree.add((min(a, b), max(a, b)))
        upper_i, upper_j = np.triu_indices(m, k=1)
        values = weights[upper_i, upper_j]
        cut = float(np.quantile(values, sparsity))
        for idx in np.flatnonzero(values < cut):
            i, j = int(upper_i[idx]), int(upper_j[idx])
            if (i, j) in tree:
                continue
            weights[i, j] = 0.0
            weights[j, i] = 0.0

    row_mass = weights.sum(axis=1)
    kernel = validate_stochastic(weights / row_mass[:, None])
    mu = row_mass / row_mass.sum()
    return ReversibleChain(kernel, mu, reversibility_defect(kernel, mu))
