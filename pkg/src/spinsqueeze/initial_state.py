"""Twisted collective-spin states and their two-spin correlations.

Basis convention used package-wide: index 0 is the excited state |0>, index 1
is the ground state |1>, so sigma_z = diag(1, -1) and the all-ground register
has <sigma_z> = -1.  The twisted state is exp(-i*theta*Jx^2/2) applied to the
all-ground register.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import comb

# Full 2**N expansion is exact but deliberately capped at desk scale.
MAX_EXPANSION_SPINS = 14


@dataclass(frozen=True)
class SystemConfig:
    """Ensemble size and twist angle (radians)."""

    n_spins: int
    theta: float

    def __post_init__(self):
        if int(self.n_spins) != self.n_spins or self.n_spins < 2:
            raise ValueError("n_spins must be an integer >= 2")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


@dataclass(frozen=True)
class CorrelationSet:
    """Single-spin expectation and pair correlations of an exchange-symmetric register.

    sz = <s1z>, szz = <s1z s2z>, y = <s1+ s2->, u = <s1+ s2+>,
    q = <vec(s1).vec(s2)>.  Every set this package produces satisfies
    q = 4*y + szz.
    """

    sz: float
    szz: float
    y: float
    u: complex
    q: float

    @property
    def v_plus(self) -> float:
        return 0.25 * (1.0 + 2.0 * self.sz + self.szz)

    @property
    def v_minus(self) -> float:
        return 0.25 * (1.0 - 2.0 * self.sz + self.szz)

    @property
    def w(self) -> float:
        return 0.25 * (1.0 - self.szz)


@dataclass(frozen=True)
class DickeState:
    """Amplitudes over the symmetric ladder |j=N/2, m>, indexed by the number
    of excited spins (index 0 = all ground, m = -N/2)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.ndim != 1 or len(amps) < 3:
            raise ValueError("amplitudes must be a vector of length n_spins + 1 >= 3")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-12:
            raise ValueError("Dicke amplitudes must be normalized to 1 within 1e-12")

    @property
    def n_spins(self) -> int:
        return len(self.amplitudes) - 1


def collective_jx_symmetric(n_spins: int) -> np.ndarray:
    """J_x on the (N+1)-dimensional symmetric ladder (real symmetric matrix)."""
    j = 0.5 * n_spins
    m = np.arange(-j, j)  # raising m -> m+1 adds one excited spin
    c = 0.5 * np.sqrt(j * (j + 1.0) - m * (m + 1.0))
    jx = np.zeros((n_spins + 1, n_spins + 1))
    idx = np.arange(n_spins)
    jx[idx + 1, idx] = c
    jx[idx, idx + 1] = c
    return jx


def twisted_state_dicke(cfg: SystemConfig) -> DickeState:
    """Apply exp(-i*theta*Jx^2/2) to the all-ground register.

    The unitary is evaluated through the eigendecomposition of the real
    symmetric Jx^2, exact to roundoff at these dimensions.
    """
    jx = collective_jx_symmetric(cfg.n_spins)
    evals, vecs = np.linalg.eigh(jx @ jx)
    start = np.zeros(cfg.n_spins + 1)
    start[0] = 1.0
    amps = vecs @ (np.exp(-0.5j * cfg.theta * evals) * (vecs.T @ start))
    return DickeState(amplitudes=amps)


def closed_initial_correlations(cfg: SystemConfig) -> CorrelationSet:
    """Correlations of the twisted state in closed form.

    The sign of Im(u) is pinned by the exp(-i*theta*Jx^2/2) state itself;
    oracle_initial_correlations is the cross-check path, and `verify` reports
    how far the opposite (conjugate) sign convention would land.
    """
    n, theta = cfg.n_spins, cfg.theta
    half = math.cos(0.5 * theta)
    c = math.cos(theta) ** (n - 2)
    sz = -(half ** (n - 1))
    szz = 0.5 * (1.0 + c)
    u = -0.125 * (1.0 - c) + 0.5j * math.sin(0.5 * theta) * half ** (n - 2)
    y = 0.25 * (1.0 - szz)
    return CorrelationSet(sz=sz, szz=szz, y=y, u=u, q=1.0)


def _popcounts(size: int) -> np.ndarray:
    """Number of set bits of each integer in [0, size)."""
    idx = np.arange(size, dtype=np.uint32)
    return np.unpackbits(idx.view(np.uint8).reshape(-1, 4), axis=1).sum(axis=1)


def dicke_to_state_vector(state: DickeState) -> np.ndarray:
    """Expand symmetric amplitudes over the 2**N computational basis.

    Bit value 1 marks a ground spin, so the basis state with k excited spins
    has N-k set bits and weight 1/sqrt(C(N, k)).
    """
    n = state.n_spins
    if n > MAX_EXPANSION_SPINS:
        raise ValueError(f"full expansion capped at {MAX_EXPANSION_SPINS} spins")
    excited = n - _popcounts(2**n)
    return state.amplitudes[excited] / np.sqrt(comb(n, excited))


def pair_marginal(psi: np.ndarray) -> np.ndarray:
    """Two-spin reduced density matrix of a pure register state (spins 1, 2)."""
    m = np.asarray(psi).reshape(4, -1)
    return m @ m.conj().T


def correlations_from_rho12(rho: np.ndarray) -> CorrelationSet:
    """Read (sz, szz, y, u) off a two-spin density matrix; sets q = 4y + szz.

    sz and y are symmetrized over the two spins; for exchange-symmetric states
    the symmetrization is a no-op.
    """
    d = np.real(np.diag(rho))
    sz = 0.5 * ((d[0] + d[1] - d[2] - d[3]) + (d[0] - d[1] + d[2] - d[3]))
    szz = d[0] - d[1] - d[2] + d[3]
    y = 0.5 * float(np.real(rho[2, 1] + rho[1, 2]))
    u = complex(rho[3, 0])
    return CorrelationSet(sz=float(sz), szz=float(szz), y=y, u=u, q=float(4.0 * y + szz))


def rho12_from_correlations(c: CorrelationSet) -> np.ndarray:
    """Assemble the parity-block two-spin matrix implied by a correlation set.

    The blocks are [[v+, u*], [u, v-]] over (|00>, |11>) and [[w, y], [y, w]]
    over (|01>, |10>); physical inputs make the result a density matrix.
    """
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = c.v_plus
    rho[3, 3] = c.v_minus
    rho[0, 3] = np.conj(c.u)
    rho[3, 0] = c.u
    rho[1, 1] = rho[2, 2] = c.w
    rho[1, 2] = rho[2, 1] = c.y
    return rho


def oracle_initial_correlations(state: DickeState) -> CorrelationSet:
    """Exact correlations of a symmetric pure state via full expansion.

    This is the ground-truth path for closed_initial_correlations; the two
    must agree within 1e-9 per component on the supported grid.
    """
    amps = state.amplitudes
    if abs(np.vdot(amps, amps).real - 1.0) > 1e-12:  # amplitudes mutated since construction
        raise ValueError("state is not normalized")
    psi = dicke_to_state_vector(state)
    return correlations_from_rho12(pair_marginal(psi))
