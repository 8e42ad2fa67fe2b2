"""Exact post-selected evolution of the full spin register.

Ground truth for every closed form in the package.  Two independent paths:

* fast (N <= 14): the symmetric amplitudes are expanded over the 2**N
  computational basis; tracing the sandwiched spins 3..N folds into a diagonal
  weight G = M (sum_l E_l^dag N^dag N E_l) M per spin, leaving a 4x4 problem.
* slow (N <= 8): the dense 2**N density matrix is sandwiched spin by spin and
  partially traced.

Both normalize by the global post-selection probability, so the reversal can
be rescaled to diag(1, 1/n) (the overall factor cancels), which keeps the
n = inf sentinel representable as a projector.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .channels import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ChannelKind,
    ProtectedChannel,
    kraus_operators,
    weak_operators,
)
from .initial_state import (
    CorrelationSet,
    DickeState,
    SystemConfig,
    _popcounts,
    correlations_from_rho12,
    dicke_to_state_vector,
    twisted_state_dicke,
)

MAX_FULL_MATRIX_SPINS = 8

_SY_SY = np.kron(SIGMA_Y, SIGMA_Y)


class PostSelectionError(RuntimeError):
    """The reversal outcome is never observed (post-selection probability 0)."""


def sandwich_operators(channel: ProtectedChannel) -> list[np.ndarray]:
    """Per-spin operators N' E_l M, with the reversal rescaled to diag(1, 1/n)."""
    kraus = kraus_operators(channel.kind, channel.p)
    if channel.bypass:
        return kraus
    pre, rev = weak_operators(channel.m, channel.n, rescale_reversal=True)
    return [rev @ e @ pre for e in kraus]


def weight_diagonal(ops: list[np.ndarray]) -> tuple[float, float]:
    """Diagonal (g0, g1) of the trace weight G = sum(op^dag op).

    G must come out diagonal for the traced-spin reduction to be a plain
    reweighting; asserted, not assumed, so new channels fail loudly.
    """
    g = sum(op.conj().T @ op for op in ops)
    scale = max(abs(g[0, 0]), abs(g[1, 1]), 1.0)
    if max(abs(g[0, 1]), abs(g[1, 0])) > 1e-13 * scale:
        raise ValueError("trace weight is not diagonal for these operators")
    return float(g[0, 0].real), float(g[1, 1].real)


def post_selected_rho12(cfg: SystemConfig, channel: ProtectedChannel) -> np.ndarray:
    """Exact two-spin state after the sandwich and global post-selection (N <= 14)."""
    psi = dicke_to_state_vector(twisted_state_dicke(cfg))
    ops = sandwich_operators(channel)
    g0, g1 = weight_diagonal(ops)
    rest = cfg.n_spins - 2
    pops = _popcounts(2**rest).astype(float)
    weights = g0 ** (rest - pops) * g1**pops
    m = psi.reshape(4, -1)
    t = (m * weights) @ m.conj().T
    pair_weight = np.array([g0 * g0, g0 * g1, g1 * g0, g1 * g1])
    z = float(np.sum(pair_weight * np.real(np.diag(t))))
    if z <= 1e-300:
        raise PostSelectionError("post-selection probability is zero")
    out = np.zeros((4, 4), dtype=complex)
    for a in ops:
        for b in ops:
            k2 = np.kron(a, b)
            out += k2 @ t @ k2.conj().T
    return out / z


def post_selected_correlations(cfg: SystemConfig, channel: ProtectedChannel) -> CorrelationSet:
    """Correlations of the exact post-selected state; q is set to 4y + szz."""
    return correlations_from_rho12(post_selected_rho12(cfg, channel))


def _embed(op: np.ndarray, spin: int, n_spins: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(2**spin), op), np.eye(2 ** (n_spins - 1 - spin)))


def post_selected_rho_full(cfg: SystemConfig, channel: ProtectedChannel) -> np.ndarray:
    """Dense 2**N post-selected state, sandwich applied spin by spin (N <= 8)."""
    n = cfg.n_spins
    if n > MAX_FULL_MATRIX_SPINS:
        raise ValueError(f"full-matrix path capped at {MAX_FULL_MATRIX_SPINS} spins")
    psi = dicke_to_state_vector(twisted_state_dicke(cfg))
    rho = np.outer(psi, psi.conj())
    ops = sandwich_operators(channel)
    for spin in range(n):
        embedded = [_embed(op, spin, n) for op in ops]
        rho = sum(e @ rho @ e.conj().T for e in embedded)
    z = np.trace(rho).real
    if z <= 1e-300:
        raise PostSelectionError("post-selection probability is zero")
    return rho / z


def rho12_from_full(rho: np.ndarray) -> np.ndarray:
    """Partial trace of a register density matrix down to spins 1, 2."""
    rest = rho.shape[0] // 4
    return np.einsum("arbr->ab", rho.reshape(4, rest, 4, rest))


def _validate_density_matrix(rho: np.ndarray, psd_tol: float):
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 two-spin density matrix")
    if abs(np.trace(rho) - 1.0) > 1e-10:
        raise ValueError("density matrix must have unit trace")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix must be Hermitian")
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if lam[0] < -psd_tol:
        raise ValueError(f"density matrix is not positive (min eig {lam[0]:.3e})")


def wootters_concurrence(rho: np.ndarray, psd_tol: float = 1e-8) -> float:
    """Pair concurrence from the spin-flip spectrum.

    lambda_i are the descending square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy); returns max(0, l1 - l2 - l3 - l4).
    Evaluated as the singular values of sqrt(rho) (sy x sy) sqrt(rho*),
    which has the same spectrum without the sqrt-of-eigenvalue precision
    loss near lambda = 0.
    """
    rho = np.asarray(rho, dtype=complex)
    _validate_density_matrix(rho, psd_tol)
    evals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    root = (vecs * np.sqrt(np.clip(evals, 0.0, None))) @ vecs.conj().T
    lam = np.linalg.svd(root @ _SY_SY @ root.conj(), compute_uv=False)
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


_BLOCK_ZEROS = [(0, 1), (0, 2), (1, 0), (2, 0), (1, 3), (2, 3), (3, 1), (3, 2)]


def block_form_check(rho: np.ndarray) -> tuple[CorrelationSet, float]:
    """Extract correlations plus the residual off the parity-block pattern.

    The residual is the largest matrix element (or in-block asymmetry) that
    the two-block form cannot represent; ~0 certifies the parity structure
    survived whatever produced the state.
    """
    rho = np.asarray(rho, dtype=complex)
    c = correlations_from_rho12(rho)
    residual = max(abs(rho[i, j]) for i, j in _BLOCK_ZEROS)
    residual = max(
        residual,
        abs(rho[1, 1] - rho[2, 2]),
        abs(np.imag(rho[1, 2])),
        abs(np.imag(rho[2, 1])),
        abs(np.imag(rho[0, 0])),
        abs(np.imag(rho[3, 3])),
    )
    return c, float(residual)


@functools.lru_cache(maxsize=None)
def _collective_operators_full(n_spins: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ops = []
    for sigma in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        total = np.zeros((2**n_spins, 2**n_spins), dtype=complex)
        for spin in range(n_spins):
            total += _embed(sigma, spin, n_spins)
        ops.append(0.5 * total)
    return tuple(ops)


def _collective_operators_symmetric(n_spins: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    j = 0.5 * n_spins
    m = np.arange(-j, j)
    c = np.sqrt(j * (j + 1.0) - m * (m + 1.0))
    raising = np.zeros((n_spins + 1, n_spins + 1), dtype=complex)
    raising[np.arange(n_spins) + 1, np.arange(n_spins)] = c
    jx = 0.5 * (raising + raising.conj().T)
    jy = -0.5j * (raising - raising.conj().T)
    jz = np.diag(np.arange(-j, j + 1)).astype(complex)
    return jx, jy, jz


def collective_squeezing(state, n_spins: int | None = None) -> tuple[float, float, float]:
    """Squeezing parameters straight from collective operators.

    Accepts a DickeState (evaluated on the (N+1)-dim symmetric ladder) or a
    dense 2**N density matrix with N <= 8.  xi1 minimizes the variance over
    the plane perpendicular to the mean spin; xi3 comes from the smallest
    eigenvalue of (N-1)*covariance + correlation matrix.  A vanishing mean
    spin leaves xi1/xi2 directionless: they come back as the inf sentinel.
    """
    if isinstance(state, DickeState):
        n_spins = state.n_spins
        jx, jy, jz = _collective_operators_symmetric(n_spins)
        rho = np.outer(state.amplitudes, state.amplitudes.conj())
    else:
        rho = np.asarray(state, dtype=complex)
        dim = rho.shape[0]
        inferred = int(round(math.log2(dim)))
        if 2**inferred != dim:
            raise ValueError("density matrix dimension must be a power of 2")
        if n_spins is None:
            n_spins = inferred
        if n_spins != inferred:
            raise ValueError("n_spins does not match the matrix dimension")
        if n_spins > MAX_FULL_MATRIX_SPINS:
            raise ValueError(f"full-matrix path capped at {MAX_FULL_MATRIX_SPINS} spins")
        jx, jy, jz = _collective_operators_full(n_spins)

    ops = (jx, jy, jz)
    means = np.array([np.trace(rho @ op).real for op in ops])
    corr = np.zeros((3, 3))
    for i in range(3):
        for jdx in range(i, 3):
            val = 0.5 * np.trace(rho @ (ops[i] @ ops[jdx] + ops[jdx] @ ops[i])).real
            corr[i, jdx] = corr[jdx, i] = val
    j_sq = corr[0, 0] + corr[1, 1] + corr[2, 2]

    length = float(np.linalg.norm(means))
    if length < 1e-12:
        x1 = x2 = math.inf
    else:
        nhat = means / length
        seed = np.zeros(3)
        seed[int(np.argmin(np.abs(nhat)))] = 1.0
        e1 = np.cross(nhat, seed)
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(nhat, e1)
        basis = np.vstack([e1, e2])
        # 2x2 covariance on the transverse plane; transverse means vanish
        cov = basis @ (corr - np.outer(means, means)) @ basis.T
        lam_min = np.linalg.eigvalsh(0.5 * (cov + cov.T))[0]
        x1 = 4.0 * lam_min / n_spins
        x2 = n_spins * n_spins / (4.0 * length * length) * x1

    gamma = corr - np.outer(means, means)
    big = (n_spins - 1) * gamma + corr
    lam_min = np.linalg.eigvalsh(0.5 * (big + big.T))[0]
    denom = j_sq - 0.5 * n_spins
    x3 = math.inf if denom <= 0.0 else lam_min / denom
    return float(x1), float(x2), float(x3)
