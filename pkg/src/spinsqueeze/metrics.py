"""Squeezing parameters, clipped measures, and pair concurrence.

All quantities derive from a CorrelationSet.  xi2/xi3 singularities come back
as the inf sentinel rather than raising, so sweeps can cross <sigma_z> = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelKind, ProtectedChannel
from .initial_state import CorrelationSet, SystemConfig, rho12_from_correlations


def xi1_sq(c: CorrelationSet, n_spins: int) -> float:
    """Minimal transverse-variance parameter: 1 + 2(N-1)(y - |u|)."""
    return 1.0 + 2.0 * (n_spins - 1) * (c.y - abs(c.u))


def xi2_sq(c: CorrelationSet, n_spins: int) -> float:
    """Mean-spin-normalized parameter xi1^2 / <sigma_z>^2; inf at sz = 0."""
    den = c.sz * c.sz
    if den == 0.0:
        return math.inf
    return xi1_sq(c, n_spins) / den


def varsigma_sq(c: CorrelationSet, n_spins: int) -> float:
    """Longitudinal-variance parameter 1 + (N-1)(szz - sz^2)."""
    return 1.0 + (n_spins - 1) * (c.szz - c.sz * c.sz)


def _xi3_denominator(c: CorrelationSet, n_spins: int) -> float:
    return (1.0 - 1.0 / n_spins) * c.q + 1.0 / n_spins


def xi3_sq(c: CorrelationSet, n_spins: int) -> float:
    """Eigenvalue-form parameter min(xi1^2, varsigma^2) / ((1-1/N)q + 1/N).

    Returns inf when the denominator is nonpositive (no entanglement witness).
    """
    den = _xi3_denominator(c, n_spins)
    if den <= 0.0:
        return math.inf
    return min(xi1_sq(c, n_spins), varsigma_sq(c, n_spins)) / den


def concurrence_branches(c: CorrelationSet) -> tuple[float, float]:
    """Unclipped branch margins 2(|u| - w) and 2(y - sqrt(v+ v-)) of the
    parity-block concurrence (slightly unphysical sets have v+- clipped at 0)."""
    root = math.sqrt(max(c.v_plus, 0.0) * max(c.v_minus, 0.0))
    return 2.0 * (abs(c.u) - c.w), 2.0 * (c.y - root)


def block_concurrence(c: CorrelationSet, n_spins: int, psd_tol: float | None = 1e-8) -> float:
    """Rescaled pair concurrence (N-1) * max(0, branches) from the block form.

    Rejects sets whose implied two-spin matrix is non-positive beyond psd_tol;
    pass psd_tol=None to accept surrogate closed-form sets as-is.
    """
    if psd_tol is not None:
        lam = np.linalg.eigvalsh(rho12_from_correlations(c))
        if lam[0] < -psd_tol:
            raise ValueError(f"correlation set implies a non-positive state (min eig {lam[0]:.3e})")
    b1, b2 = concurrence_branches(c)
    return (n_spins - 1) * max(0.0, b1, b2)


@dataclass(frozen=True)
class SqueezingReport:
    """Squeezing parameters, their clipped forms, and the rescaled concurrence.

    xi3_sq is the definitional value (with the min over xi1/varsigma in the
    numerator); xi3_sq_plain keeps only xi1 there.  zeta_k = max(0, 1 - xi_k),
    so inf sentinels clip to zero squeezing.
    """

    xi1_sq: float
    xi2_sq: float
    xi3_sq: float
    xi3_sq_plain: float
    varsigma_sq: float
    zeta1_sq: float
    zeta2_sq: float
    zeta3_sq: float
    concurrence: float
    concurrence_branch: str


def _clip(x: float) -> float:
    # cap at 1 as well: surrogate closed-form sets can push xi below 0
    return min(1.0, max(0.0, 1.0 - x))


def _branch_label(b1: float, b2: float) -> str:
    if max(b1, b2) <= 0.0:
        return "none"
    return "u-w" if b1 >= b2 else "y-v"


def _assemble(x1, x2, x3, x3_plain, vs, cr, branch) -> SqueezingReport:
    return SqueezingReport(
        xi1_sq=x1, xi2_sq=x2, xi3_sq=x3, xi3_sq_plain=x3_plain, varsigma_sq=vs,
        zeta1_sq=_clip(x1), zeta2_sq=_clip(x2), zeta3_sq=_clip(x3),
        concurrence=cr, concurrence_branch=branch,
    )


def report_from_correlations(c: CorrelationSet, n_spins: int) -> SqueezingReport:
    """Full report from a correlation set (generic pipeline path)."""
    x1 = xi1_sq(c, n_spins)
    x2 = xi2_sq(c, n_spins)
    vs = varsigma_sq(c, n_spins)
    den = _xi3_denominator(c, n_spins)
    x3 = min(x1, vs) / den if den > 0.0 else math.inf
    x3_plain = x1 / den if den > 0.0 else math.inf
    b1, b2 = concurrence_branches(c)
    cr = (n_spins - 1) * max(0.0, b1, b2)
    return _assemble(x1, x2, x3, x3_plain, vs, cr, _branch_label(b1, b2))


def _initial_closed(cfg: SystemConfig):
    """Closed-form ingredients of the twisted state: sz0, szz0, q12y, u0, C0."""
    n, theta = cfg.n_spins, cfg.theta
    half = math.cos(0.5 * theta)
    c = math.cos(theta) ** (n - 2)
    sz0 = -(half ** (n - 1))
    szz0 = 0.5 * (1.0 + c)
    q12y = 0.5 * (1.0 - c)
    u0 = -0.125 * (1.0 - c) + 0.5j * math.sin(0.5 * theta) * half ** (n - 2)
    c0 = 0.25 * (math.hypot(1.0 - c, 4.0 * math.sin(0.5 * theta) * half ** (n - 2)) - (1.0 - c))
    return sz0, szz0, q12y, u0, c0


def closed_form_report(cfg: SystemConfig, channel: ProtectedChannel) -> SqueezingReport:
    """End-to-end closed-form report for a protected channel.

    Coded independently of evolve_correlations: evaluates the explicit
    per-channel parameter expressions, with the ADC written in k = m^2 - p so
    the p = 1 limit stays finite.  The concurrence keeps the single |u| - w
    branch of the per-channel closed form.
    """
    n_spins = cfg.n_spins
    sz0, szz0, q12y, u0, c0 = _initial_closed(cfg)
    cr0 = (n_spins - 1) * c0
    p, s, m, n = channel.p, channel.s, channel.m, channel.n
    if channel.kind is ChannelKind.AMPLITUDE_DAMPING:
        k = max(channel.k, 0.0)
        norm = k + p  # m^2 under the constraint, 1 in bypass
        fpre = m * m * k  # s m^2 n^2
        sz1 = (k * sz0 - p) / norm
        szz1 = (k * k * szz0 - 2.0 * k * p * sz0 + p * p) / (norm * norm)
        q1 = (m * m * k + k * (k - m * m) * szz0 - 2.0 * k * p * sz0 + p * p) / (norm * norm)
    elif channel.kind is ChannelKind.DEPOLARIZING:
        n2 = n * n  # bypass has n = 1, which the m = 1 expressions cover
        norm = 0.5 * ((n2 * s - s) * sz0 + n2 + 1.0)
        fpre = s * s * n2
        a = n2 * s + s
        b = n2 - 1.0
        sz1 = 0.5 * (a * sz0 + b) / norm
        szz1 = 0.25 * (a * a * szz0 + 2.0 * a * b * sz0 + b * b) / (norm * norm)
        q1 = (fpre * (1.0 - szz0) + 0.25 * (a * a * szz0 + 2.0 * a * b * sz0 + b * b)) / (norm * norm)
    elif channel.kind is ChannelKind.PHASE_DAMPING:
        if channel.bypass:
            # m = n = 1 violates the dephasing constraint; the unconstrained
            # per-spin map is the plain trace-preserving channel.
            norm = 1.0
            fpre = s * s
            sz1, szz1 = sz0, szz0
            q1 = fpre * (1.0 - szz0) + szz0
        else:
            m2p1 = m * m + 1.0
            norm = m2p1 + sz0
            fpre = s * s * m * m * n * n
            sz1 = (m2p1 * sz0 + 1.0) / norm
            szz1 = (m2p1 * m2p1 * szz0 + 2.0 * m2p1 * sz0 + 1.0) / (norm * norm)
            q1 = (fpre * (1.0 - szz0) + m2p1 * m2p1 * szz0 + 2.0 * m2p1 * sz0 + 1.0) / (norm * norm)
    else:
        raise ValueError(f"unknown channel kind {channel.kind!r}")

    x1 = 1.0 - fpre * cr0 / (norm * norm)
    den_sz = sz1 * sz1
    x2 = math.inf if den_sz == 0.0 else x1 / den_sz
    vs = 1.0 + (n_spins - 1) * (szz1 - sz1 * sz1)
    den = (1.0 - 1.0 / n_spins) * q1 + 1.0 / n_spins
    x3_plain = x1 / den if den > 0.0 else math.inf
    x3 = min(x1, vs) / den if den > 0.0 else math.inf
    u_ev = -fpre * (0.5 * q12y + u0)  # evolved pair coherence before the 1/norm^2 scale
    b1 = 2.0 * (abs(u_ev) / (norm * norm) - 0.25 * (1.0 - szz1))
    cr = (n_spins - 1) * max(0.0, b1)
    return _assemble(x1, x2, x3, x3_plain, vs, cr, "u-w" if b1 > 0.0 else "none")


def asymptotic_report(kind: ChannelKind, cfg: SystemConfig, p: float | None = None) -> SqueezingReport:
    """Strength-limit report: ADC at m -> inf, PDC at m -> 0.

    Both limits are independent of p (the ADC recovers the initial report,
    the PDC settles on a stationary one); p is accepted for signature
    symmetry with the finite-strength reports.
    """
    n_spins = cfg.n_spins
    sz0, szz0, _, _, c0 = _initial_closed(cfg)
    cr0 = (n_spins - 1) * c0
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        x1 = 1.0 - cr0
        den_sz = sz0 * sz0
        x2 = math.inf if den_sz == 0.0 else x1 / den_sz
        vs = 1.0 + (n_spins - 1) * (szz0 - sz0 * sz0)
        x3_plain = x1  # q = 1 in this limit
        x3 = min(x1, vs)
        return _assemble(x1, x2, x3, x3_plain, vs, cr0, "u-w" if cr0 > 0.0 else "none")
    if kind is ChannelKind.PHASE_DAMPING:
        norm = 1.0 + sz0
        szz1 = (szz0 + 2.0 * sz0 + 1.0) / (norm * norm)
        q1 = szz1
        x1 = 1.0
        x2 = 1.0  # the limit drives <sigma_z> to exactly 1
        vs = 1.0 + (n_spins - 1) * (szz1 - 1.0)
        den = (1.0 - 1.0 / n_spins) * q1 + 1.0 / n_spins
        x3_plain = x1 / den if den > 0.0 else math.inf
        x3 = min(x1, vs) / den if den > 0.0 else math.inf
        b1 = 0.5 * (szz1 - 1.0)  # 2(|u| - w) with u -> 0
        cr = (n_spins - 1) * max(0.0, b1)
        return _assemble(x1, x2, x3, x3_plain, vs, cr, "u-w" if b1 > 0.0 else "none")
    raise ValueError("only the damping and dephasing channels have strength limits")
