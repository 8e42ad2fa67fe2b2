"""Decoherence channels, weak-measurement sandwich, and closed-form transport.

Each spin independently passes through M = diag(1, m), a Kraus channel of
strength p, and the reversal N = diag(n, 1), followed by post-selection.  With
the channel-specific constraint between m and n the post-selected action on
correlations reduces to a per-spin linear map on the Pauli components; this
module carries those coefficients and the resulting correlation transport.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .initial_state import CorrelationSet

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

_CONSTRAINT_TOL = 1e-9


class ChannelKind(enum.Enum):
    AMPLITUDE_DAMPING = "adc"
    DEPOLARIZING = "dpc"
    PHASE_DAMPING = "pdc"


class ConstraintError(ValueError):
    """Measurement strengths cannot satisfy the channel's reversal constraint."""


def kraus_operators(kind: ChannelKind, p: float) -> list[np.ndarray]:
    """Kraus set of the bare channel at decoherence strength p.

    ADC: {diag(sqrt(s), 1), sqrt(p)|1><0|} with s = 1-p (decay toward ground).
    DPC: {sqrt(1-p')I, sqrt(p'/3) sigma_{x,y,z}} with p' = 3p/4.
    PDC: {sqrt(s)I, sqrt(p)|0><0|, sqrt(p)|1><1|}.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("decoherence strength p must lie in [0, 1]")
    s = 1.0 - p
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        e0 = np.diag([math.sqrt(s), 1.0]).astype(complex)
        e1 = np.array([[0.0, 0.0], [math.sqrt(p), 0.0]], dtype=complex)
        return [e0, e1]
    if kind is ChannelKind.DEPOLARIZING:
        pp = 0.75 * p
        return [
            math.sqrt(1.0 - pp) * np.eye(2, dtype=complex),
            math.sqrt(pp / 3.0) * SIGMA_X,
            math.sqrt(pp / 3.0) * SIGMA_Y,
            math.sqrt(pp / 3.0) * SIGMA_Z,
        ]
    if kind is ChannelKind.PHASE_DAMPING:
        return [
            math.sqrt(s) * np.eye(2, dtype=complex),
            math.sqrt(p) * np.diag([1.0, 0.0]).astype(complex),
            math.sqrt(p) * np.diag([0.0, 1.0]).astype(complex),
        ]
    raise ValueError(f"unknown channel kind {kind!r}")


def weak_operators(m: float, n: float, rescale_reversal: bool = False):
    """Pre-measurement M = diag(1, m) and reversal N = diag(n, 1).

    With rescale_reversal the reversal comes back as diag(1, 1/n): the overall
    factor n cancels in the post-selected normalization, and n = inf becomes
    the projector diag(1, 0).
    """
    if not (isinstance(m, (int, float)) and m > 0.0 and math.isfinite(m)):
        raise ValueError("pre-measurement strength m must be positive and finite")
    pre = np.diag([1.0, float(m)]).astype(complex)
    if math.isinf(n):
        if not rescale_reversal:
            raise ValueError("infinite reversal strength requires rescale_reversal")
        return pre, np.diag([1.0, 0.0]).astype(complex)
    if not n > 0.0:
        raise ValueError("reversal strength n must be positive")
    rev = np.diag([1.0, 1.0 / n]) if rescale_reversal else np.diag([float(n), 1.0])
    return pre, rev.astype(complex)


@dataclass(frozen=True)
class ProtectedChannel:
    """A channel kind with decoherence strength p and the weak-measurement pair.

    bypass=True means M = N = identity ("without weak measurement"); otherwise
    the kind-specific constraint between m and n must hold:
    ADC s*n^2 + p = m^2, DPC m = 1, PDC n^2 = m^2 + 2.
    """

    kind: ChannelKind
    p: float
    m: float = 1.0
    n: float = 1.0
    bypass: bool = False

    @property
    def s(self) -> float:
        return 1.0 - self.p

    @property
    def k(self) -> float:
        """s*n^2, evaluated as m^2 - p for the constrained ADC so p = 1 stays finite."""
        if self.kind is ChannelKind.AMPLITUDE_DAMPING and not self.bypass:
            return self.m * self.m - self.p
        return self.s * self.n * self.n

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("decoherence strength p must lie in [0, 1]")
        if not (self.m > 0.0 and math.isfinite(self.m)):
            raise ValueError("m must be positive and finite")
        if not self.n > 0.0:
            raise ValueError("n must be positive")
        if self.bypass:
            if self.m != 1.0 or self.n != 1.0:
                raise ValueError("bypass mode fixes m = n = 1")
            return
        if math.isinf(self.n) and self.kind is not ChannelKind.AMPLITUDE_DAMPING:
            raise ValueError("infinite n is only meaningful for the damping channel at p = 1")
        self._check_constraint()

    def _check_constraint(self):
        m2 = self.m * self.m
        if self.kind is ChannelKind.AMPLITUDE_DAMPING:
            if m2 < self.p - _CONSTRAINT_TOL:
                raise ConstraintError("no real reversal strength exists: m^2 < p")
            if math.isinf(self.n):
                if self.s > 0.0:
                    raise ConstraintError("infinite n is only consistent with p = 1")
                return
            if abs(self.s * self.n * self.n + self.p - m2) > _CONSTRAINT_TOL * max(1.0, m2):
                raise ConstraintError("damping constraint s*n^2 + p = m^2 violated")
        elif self.kind is ChannelKind.DEPOLARIZING:
            if abs(self.m - 1.0) > _CONSTRAINT_TOL:
                raise ConstraintError("depolarizing constraint fixes m = 1")
        elif self.kind is ChannelKind.PHASE_DAMPING:
            n2 = self.n * self.n
            if abs(n2 - m2 - 2.0) > _CONSTRAINT_TOL * max(1.0, n2):
                raise ConstraintError("dephasing constraint n^2 = m^2 + 2 violated")


def bypass_channel(kind: ChannelKind, p: float) -> ProtectedChannel:
    """The plain trace-preserving channel: no weak measurement, no reversal."""
    return ProtectedChannel(kind=kind, p=p, m=1.0, n=1.0, bypass=True)


def solve_strengths(kind: ChannelKind, p: float, m: float | None = None,
                    n: float | None = None) -> ProtectedChannel:
    """Complete the strength pair from the kind's reversal constraint.

    ADC couples them through s*n^2 + p = m^2 (at p = 1 the solution is the
    n = inf sentinel), DPC fixes m = 1 with n the free knob, PDC couples them
    through n^2 = m^2 + 2.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("decoherence strength p must lie in [0, 1]")
    s = 1.0 - p
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        if m is not None:
            if m * m < p:
                raise ConstraintError("no real reversal strength exists: m^2 < p")
            if s > 0.0:
                n = math.sqrt((m * m - p) / s)
            else:
                n = 1.0 if m * m == p else math.inf
        elif n is not None:
            m = math.sqrt(s * n * n + p)
        else:
            raise ValueError("damping channel needs m or n")
    elif kind is ChannelKind.DEPOLARIZING:
        if m is not None and abs(m - 1.0) > _CONSTRAINT_TOL:
            raise ConstraintError("depolarizing constraint fixes m = 1")
        if n is None:
            raise ValueError("depolarizing channel takes the reversal strength n")
        m = 1.0
    elif kind is ChannelKind.PHASE_DAMPING:
        if m is not None:
            n = math.sqrt(m * m + 2.0)
        elif n is not None:
            if n * n <= 2.0:
                raise ConstraintError("dephasing reversal needs n^2 > 2")
            m = math.sqrt(n * n - 2.0)
        else:
            raise ValueError("dephasing channel needs m or n")
    else:
        raise ValueError(f"unknown channel kind {kind!r}")
    return ProtectedChannel(kind=kind, p=p, m=float(m), n=float(n))


@dataclass(frozen=True)
class DualMapCoefficients:
    """Per-spin Heisenberg-picture action of the post-selected sandwich.

    sigma_x, sigma_y -> f_xy * sigma; sigma_z -> f_z * sigma_z + c_z, after
    dividing by the per-spin normalization `norm`.
    """

    f_xy: float
    f_z: float
    c_z: float
    norm: float


def dual_map(channel: ProtectedChannel, sz0: float | None = None) -> DualMapCoefficients:
    """Coefficients of the per-spin dual map.

    The ADC is parameterized through k = s*n^2 = m^2 - p, which keeps every
    coefficient finite in the p -> 1 limit; its normalization m^2 is state
    independent (the map is exactly trace preserving under the constraint).
    The DPC/PDC normalizations depend on the initial <sigma_z>, which is why
    they are per-spin surrogates of the global post-selection normalization.
    """
    p, s, m, n = channel.p, channel.s, channel.m, channel.n
    if channel.kind is ChannelKind.AMPLITUDE_DAMPING:
        k = max(channel.k, 0.0)
        norm = m * m  # equals k + p
        return DualMapCoefficients(
            f_xy=m * math.sqrt(k) / norm, f_z=k / norm, c_z=-p / norm, norm=norm
        )
    if channel.bypass:
        m = n = 1.0
    n2, m2 = n * n, m * m
    if channel.kind is ChannelKind.DEPOLARIZING:
        alpha = 0.5 * (n2 + 1.0)
        beta = 0.5 * s * (n2 - 1.0)
        gamma = 0.5 * s * (n2 + 1.0)
        delta = 0.5 * (n2 - 1.0)
        off = n * s
    else:  # phase damping
        alpha = gamma = 0.5 * (n2 + m2)
        beta = delta = 0.5 * (n2 - m2)
        off = m * n * s
    if beta != 0.0 and sz0 is None:
        raise ValueError("this channel's normalization needs the initial <sigma_z>")
    norm = alpha + beta * (sz0 if sz0 is not None else 0.0)
    if norm <= 0.0:
        raise ValueError("nonpositive per-spin normalization")
    return DualMapCoefficients(f_xy=off / norm, f_z=gamma / norm, c_z=delta / norm, norm=norm)


def _q_amplitude_damping(ch: ProtectedChannel, sz0: float, szz0: float) -> float:
    k, p = ch.k, ch.p
    m2 = ch.m * ch.m
    return (m2 * k + k * (k - m2) * szz0 - 2.0 * k * p * sz0 + p * p) / (m2 * m2)


def _q_depolarizing(ch: ProtectedChannel, sz0: float, szz0: float) -> float:
    s, n2 = ch.s, ch.n * ch.n
    m2norm = 0.5 * ((n2 * s - s) * sz0 + n2 + 1.0)
    a = n2 * s + s
    b = n2 - 1.0
    num = s * s * n2 * (1.0 - szz0) + 0.25 * (a * a * szz0 + 2.0 * a * b * sz0 + b * b)
    return num / (m2norm * m2norm)


def _q_phase_damping(ch: ProtectedChannel, sz0: float, szz0: float) -> float:
    s, m2 = ch.s, ch.m * ch.m
    n2 = ch.n * ch.n
    m3 = m2 + 1.0 + sz0
    num = s * s * m2 * n2 * (1.0 - szz0) + (m2 + 1.0) ** 2 * szz0 + 2.0 * (m2 + 1.0) * sz0 + 1.0
    return num / (m3 * m3)


_Q_FORMS = {
    ChannelKind.AMPLITUDE_DAMPING: _q_amplitude_damping,
    ChannelKind.DEPOLARIZING: _q_depolarizing,
    ChannelKind.PHASE_DAMPING: _q_phase_damping,
}


def evolve_correlations(channel: ProtectedChannel, c0: CorrelationSet) -> CorrelationSet:
    """Transport a correlation set through the post-selected sandwich.

    The transverse correlations scale by f_xy^2, sigma_z components follow the
    affine dual map, and q is recomputed from the per-kind closed expression
    (generic transport in bypass mode).  q = 4y + szz holds for every output.
    """
    coeff = dual_map(channel, sz0=c0.sz)
    f2 = coeff.f_xy * coeff.f_xy
    sz = coeff.f_z * c0.sz + coeff.c_z
    szz = coeff.f_z**2 * c0.szz + 2.0 * coeff.f_z * coeff.c_z * c0.sz + coeff.c_z**2
    y = f2 * c0.y
    u = f2 * c0.u
    if channel.bypass:
        q = f2 * (c0.q - c0.szz) + szz
    else:
        q = _Q_FORMS[channel.kind](channel, c0.sz, c0.szz)
    return CorrelationSet(sz=sz, szz=szz, y=y, u=u, q=q)


def p_from_time(gamma: float, t: float) -> float:
    """Damping strength accumulated by rate gamma over time t: p = 1 - exp(-gamma*t/2)."""
    if gamma < 0.0 or t < 0.0:
        raise ValueError("gamma and t must be nonnegative")
    return 1.0 - math.exp(-0.5 * gamma * t)
