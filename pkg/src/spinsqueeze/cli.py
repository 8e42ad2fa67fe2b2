"""Command-line front end: sweeps, figure presets, sudden-death location, verify.

Output contract: CSV rows under the fixed header
p,xi1_sq,xi2_sq,xi3_sq,zeta2_sq,zeta3_sq,concurrence,source with inf/nan
serialized literally; rows that fail (infeasible constraint, zero-probability
post-selection) carry nan values plus a trailing error token.  JSON output
wraps the same rows with a meta block echoing the sweep spec.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import __version__
from .channels import (
    ChannelKind,
    ConstraintError,
    bypass_channel,
    evolve_correlations,
    solve_strengths,
)
from .initial_state import SystemConfig, closed_initial_correlations, oracle_initial_correlations, twisted_state_dicke
from .metrics import (
    closed_form_report,
    concurrence_branches,
    report_from_correlations,
)
from .oracle import (
    PostSelectionError,
    block_form_check,
    post_selected_rho12,
    post_selected_rho_full,
    rho12_from_full,
    wootters_concurrence,
)

CSV_FIELDS = ("p", "xi1_sq", "xi2_sq", "xi3_sq", "zeta2_sq", "zeta3_sq", "concurrence", "source")
CSV_HEADER = ",".join(CSV_FIELDS)

_KIND_BY_NAME = {kind.value: kind for kind in ChannelKind}


def parse_theta(text: str) -> float:
    """Twist angle from a radian float or '<x>pi' multiplicative notation."""
    cleaned = str(text).strip().lower()
    if cleaned.endswith("pi"):
        head = cleaned[:-2].strip()
        return (float(head) if head else 1.0) * math.pi
    return float(cleaned)


def parse_p_grid(text: str) -> tuple[float, float, float]:
    """Decoherence grid from 'start:stop:step'."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError("p grid must look like start:stop:step")
    start, stop, step = (float(v) for v in parts)
    return start, stop, step


@dataclass(frozen=True)
class SweepSpec:
    """A sweep over decoherence strength for one channel configuration."""

    kind: ChannelKind
    theta: float
    n_spins: int
    m: float | None = None
    n: float | None = None
    bypass: bool = False
    p_start: float = 0.0
    p_stop: float = 1.0
    p_step: float = 0.005
    p_values: tuple[float, ...] | None = None
    source: str = "closed"
    fmt: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.source not in ("closed", "oracle", "both"):
            raise ValueError("source must be closed, oracle, or both")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.bypass and (self.m is not None or self.n is not None):
            raise ValueError("bypass excludes explicit strengths")
        if not self.bypass and self.m is None and self.n is None:
            raise ValueError("give a strength (m or n) or set bypass")
        if self.source != "closed" and self.n_spins > 14:
            raise ValueError("oracle sweeps are capped at 14 spins")


def _sweep_grid(spec: SweepSpec) -> list[float]:
    if spec.p_values is not None:
        points = [float(v) for v in spec.p_values]
    else:
        if spec.p_step <= 0.0:
            raise ValueError("p grid step must be positive")
        count = int(math.floor((spec.p_stop - spec.p_start) / spec.p_step + 1e-9))
        points = [round(spec.p_start + i * spec.p_step, 12) for i in range(count + 1)]
    for p in points:
        if not 0.0 <= p <= 1.0:
            raise ValueError("p grid must lie within [0, 1]")
    return points


def _channel_at(spec: SweepSpec, p: float):
    if spec.bypass:
        return bypass_channel(spec.kind, p)
    return solve_strengths(spec.kind, p, m=spec.m, n=spec.n)


def _report_row(p: float, rep, source: str) -> dict:
    return {
        "p": p,
        "xi1_sq": rep.xi1_sq,
        "xi2_sq": rep.xi2_sq,
        "xi3_sq": rep.xi3_sq,
        "zeta2_sq": rep.zeta2_sq,
        "zeta3_sq": rep.zeta3_sq,
        "concurrence": rep.concurrence,
        "source": source,
        "error": None,
    }


def _error_row(p: float, source: str, token: str) -> dict:
    nan = float("nan")
    row = {field: nan for field in CSV_FIELDS[1:-1]}
    row.update({"p": p, "source": source, "error": token})
    return row


def run_sweep(spec: SweepSpec) -> list[dict]:
    """One row per grid point (two with source=both), in grid order.

    Constrained strengths are re-solved at every p (the damping constraint
    couples n to s); points that cannot run are emitted as error rows so the
    sweep always completes.
    """
    cfg = SystemConfig(spec.n_spins, spec.theta)
    sources = ("closed", "oracle") if spec.source == "both" else (spec.source,)
    rows = []
    for p in _sweep_grid(spec):
        for source in sources:
            try:
                channel = _channel_at(spec, p)
                if source == "closed":
                    rep = closed_form_report(cfg, channel)
                else:
                    rho = post_selected_rho12(cfg, channel)
                    corr, _ = block_form_check(rho)
                    rep = report_from_correlations(corr, cfg.n_spins)
                    rep = dataclasses.replace(
                        rep, concurrence=(cfg.n_spins - 1) * wootters_concurrence(rho)
                    )
                rows.append(_report_row(p, rep, source))
            except ConstraintError:
                rows.append(_error_row(p, source, "infeasible-constraint"))
            except PostSelectionError:
                rows.append(_error_row(p, source, "zero-probability"))
    return rows


def _csv_value(value) -> str:
    if isinstance(value, str):
        return value
    return repr(float(value))


def rows_to_csv(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        cells = [_csv_value(row[field]) for field in CSV_FIELDS]
        if row.get("error"):
            cells.append(f"error:{row['error']}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _json_safe(value):
    if isinstance(value, dict):
        return {key: _json_safe(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(val) for val in value]
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)  # 'inf', '-inf', 'nan' as literal tokens
    return value


def rows_to_json(spec: SweepSpec, rows: list[dict]) -> str:
    meta = {
        "artifact": "spinsqueeze",
        "version": __version__,
        "spec": {
            "channel": spec.kind.value,
            "theta": spec.theta,
            "n_spins": spec.n_spins,
            "m": spec.m,
            "n": spec.n,
            "bypass": spec.bypass,
            "p_start": spec.p_start,
            "p_stop": spec.p_stop,
            "p_step": spec.p_step,
            "p_values": list(spec.p_values) if spec.p_values is not None else None,
            "source": spec.source,
        },
    }
    body = {"meta": meta, "rows": [_json_safe(dict(row)) for row in rows]}
    return json.dumps(body, indent=2) + "\n"


_FIGURE_PRESETS = {
    "fig1a": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=0.1 * math.pi, bypass=True),
    "fig1b": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=0.1 * math.pi, m=2.0),
    "fig1c": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=0.1 * math.pi, m=4.0),
    "fig1d": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=0.1 * math.pi, m=30.0),
    "fig2a": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=1.8 * math.pi, bypass=True),
    "fig2b": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=1.8 * math.pi, m=4.0),
    "fig2c": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=1.8 * math.pi, m=8.0),
    "fig2d": dict(kind=ChannelKind.AMPLITUDE_DAMPING, theta=1.8 * math.pi, m=70.0),
    "fig3a": dict(kind=ChannelKind.DEPOLARIZING, theta=1.8 * math.pi, bypass=True),
    "fig3b": dict(kind=ChannelKind.DEPOLARIZING, theta=1.8 * math.pi, n=2.0),
    "fig3c": dict(kind=ChannelKind.DEPOLARIZING, theta=1.8 * math.pi, n=10.0),
    "fig3d": dict(kind=ChannelKind.DEPOLARIZING, theta=1.8 * math.pi, n=500.0),
    "fig4a": dict(kind=ChannelKind.PHASE_DAMPING, theta=1.8 * math.pi, bypass=True),
    "fig4b": dict(kind=ChannelKind.PHASE_DAMPING, theta=1.8 * math.pi, m=1.0),
    "fig4c": dict(kind=ChannelKind.PHASE_DAMPING, theta=1.8 * math.pi, m=0.5),
    "fig4d": dict(kind=ChannelKind.PHASE_DAMPING, theta=1.8 * math.pi, m=0.01),
}


def figure_preset(fig_id: str) -> SweepSpec:
    """Sweep spec for one of the preset curves fig1a..fig4d (N = 12 throughout,
    p from 0 to 1 in steps of 0.005, closed-form source); variant 'a' runs the
    bare channel without weak measurement."""
    try:
        kwargs = _FIGURE_PRESETS[fig_id]
    except KeyError:
        raise ValueError(f"unknown figure preset {fig_id!r}") from None
    return SweepSpec(n_spins=12, p_start=0.0, p_stop=1.0, p_step=0.005,
                     source="closed", **kwargs)


_SSSD_QUANTITIES = ("zeta2", "zeta3", "concurrence")


def find_sssd(kind: ChannelKind, theta: float, n_spins: int, quantity: str,
              m: float | None = None, n: float | None = None, bypass: bool = False,
              xtol: float = 1e-8) -> float | None:
    """Smallest p in (0, 1) where the closed-form quantity first hits zero.

    Returns None when the quantity stays positive on [0, 1) (vanishing only at
    the boundary counts as none).  Bisection runs on the unclipped margin
    (1 - xi^2, or the unclipped concurrence branch) so a sign change exists.
    """
    if quantity not in _SSSD_QUANTITIES:
        raise ValueError(f"quantity must be one of {_SSSD_QUANTITIES}")
    cfg = SystemConfig(n_spins, theta)
    c0 = closed_initial_correlations(cfg)

    def channel_at(p: float):
        if bypass:
            return bypass_channel(kind, p)
        return solve_strengths(kind, p, m=m, n=n)

    def margin(p: float) -> float:
        channel = channel_at(p)
        if quantity == "concurrence":
            b1, _ = concurrence_branches(evolve_correlations(channel, c0))
            value = (n_spins - 1) * b1
        else:
            rep = closed_form_report(cfg, channel)
            value = 1.0 - (rep.xi2_sq if quantity == "zeta2" else rep.xi3_sq)
        return max(value, -1e9)  # floor the inf blowups; roots sit before them

    if margin(0.0) <= 0.0:
        raise ValueError(f"{quantity} is not positive at p = 0")
    grid = np.arange(0.0, 1.0 + 5e-4, 1e-3)
    grid[-1] = 1.0
    previous = 0.0
    for p in grid[1:]:
        value = margin(float(p))
        if value <= 0.0:
            if p == 1.0 and value >= -1e-12:
                return None  # vanishes only in the asymptotic limit
            if value == 0.0:
                return float(p)
            return float(brentq(margin, previous, float(p), xtol=xtol))
        previous = float(p)
    return None


@dataclass
class ConformanceReport:
    """Closed-form vs oracle deviations plus the promised-invariant flags.

    Per-channel deviations are data (the DPC/PDC normalizations are per-spin
    surrogates of the global post-selection, so their gap is an empirical
    output); the pass/fail contract covers the initial state, ADC exactness,
    and agreement of the two oracle paths.
    """

    n_spins: int
    initial_max_deviation: float
    initial_conjugate_u_deviation: float
    channels: dict
    adc_exact: bool | None  # None when the run excluded the damping channel
    adc_max_deviation: float
    dual_path_max_deviation: float
    block_residual_max: float
    xi3_min_vs_plain_max_gap: float
    zero_probability_points: int
    passed: bool

    def to_json(self) -> str:
        return json.dumps(_json_safe(dataclasses.asdict(self)), indent=2) + "\n"


def _deviation(a: float, b: float) -> float:
    """Scale-normalized gap for report fields.

    xi2/xi3 diverge near <sigma_z> = 0, where an absolute gap only measures
    floating-point amplification; dividing by max(1, |a|, |b|) keeps the
    comparison absolute for order-one fields and relative past that.
    """
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return math.inf
    return abs(a - b) / max(1.0, abs(a), abs(b))


_VERIFY_STRENGTHS = {
    ChannelKind.AMPLITUDE_DAMPING: [{"m": 1.0}, {"m": 2.0}, {"m": 4.0}],
    ChannelKind.DEPOLARIZING: [{"n": 1.0}, {"n": 2.0}, {"n": 10.0}],
    ChannelKind.PHASE_DAMPING: [{"m": 0.5}, {"m": 1.0}, {"m": 2.0}],
}

_CORR_FIELDS = ("sz", "szz", "y", "u", "q")
_REPORT_FIELDS = ("xi1_sq", "xi2_sq", "xi3_sq", "zeta2_sq", "zeta3_sq", "concurrence")


def verify(n_spins: int = 6, kinds: tuple[ChannelKind, ...] | None = None,
           p_step: float = 0.05) -> ConformanceReport:
    """Run the conformance checks and collect the deviation table.

    Promised invariants (drive the exit status): initial-state closed forms
    match the state-vector oracle within 1e-9; ADC closed forms match the
    exact post-selected oracle within 1e-9; the two oracle paths agree within
    1e-10.  Everything else is reported as data.
    """
    if kinds is None:
        kinds = tuple(ChannelKind)
    thetas = (0.1 * math.pi, 1.8 * math.pi)
    p_grid = [round(i * p_step, 12) for i in range(int(math.floor(0.95 / p_step + 1e-9)) + 1)]

    initial_dev = 0.0
    conjugate_dev = 0.0
    for n_init in (2, 3, 6, 12):
        for step_idx in range(21):
            cfg = SystemConfig(n_init, 0.1 * math.pi * step_idx)
            closed = closed_initial_correlations(cfg)
            exact = oracle_initial_correlations(twisted_state_dicke(cfg))
            initial_dev = max(
                initial_dev,
                abs(closed.sz - exact.sz),
                abs(closed.szz - exact.szz),
                abs(closed.y - exact.y),
                abs(closed.u - exact.u),
                abs(closed.q - exact.q),
            )
            conjugate_dev = max(conjugate_dev, abs(np.conj(closed.u) - exact.u))

    channel_devs: dict = {}
    block_residual_max = 0.0
    xi3_gap = 0.0
    zero_prob = 0
    for kind in kinds:
        devs = {field: 0.0 for field in _CORR_FIELDS + _REPORT_FIELDS}
        configurations = [{"bypass": True}] + _VERIFY_STRENGTHS[kind]
        for theta in thetas:
            cfg = SystemConfig(n_spins, theta)
            c0 = closed_initial_correlations(cfg)
            for strengths in configurations:
                for p in p_grid:
                    try:
                        if strengths.get("bypass"):
                            channel = bypass_channel(kind, p)
                        else:
                            channel = solve_strengths(kind, p, **strengths)
                        rho = post_selected_rho12(cfg, channel)
                    except ConstraintError:
                        continue
                    except PostSelectionError:
                        zero_prob += 1
                        continue
                    oracle_corr, residual = block_form_check(rho)
                    block_residual_max = max(block_residual_max, residual)
                    closed_corr = evolve_correlations(channel, c0)
                    devs["sz"] = max(devs["sz"], abs(closed_corr.sz - oracle_corr.sz))
                    devs["szz"] = max(devs["szz"], abs(closed_corr.szz - oracle_corr.szz))
                    devs["y"] = max(devs["y"], abs(closed_corr.y - oracle_corr.y))
                    devs["u"] = max(devs["u"], abs(closed_corr.u - oracle_corr.u))
                    devs["q"] = max(devs["q"], abs(closed_corr.q - oracle_corr.q))
                    closed_rep = closed_form_report(cfg, channel)
                    oracle_rep = report_from_correlations(oracle_corr, n_spins)
                    oracle_rep = dataclasses.replace(
                        oracle_rep, concurrence=(n_spins - 1) * wootters_concurrence(rho)
                    )
                    for field in _REPORT_FIELDS:
                        devs[field] = max(
                            devs[field],
                            _deviation(getattr(closed_rep, field), getattr(oracle_rep, field)),
                        )
                    if math.isfinite(closed_rep.xi3_sq) and math.isfinite(closed_rep.xi3_sq_plain):
                        xi3_gap = max(xi3_gap, abs(closed_rep.xi3_sq - closed_rep.xi3_sq_plain))
        channel_devs[kind.value] = devs

    dual_dev = 0.0
    n_dual = min(n_spins, 8)
    for kind in kinds:
        cfg = SystemConfig(n_dual, 1.8 * math.pi)
        for strengths in [{"bypass": True}, _VERIFY_STRENGTHS[kind][1]]:
            for p in (0.0, 0.3, 0.7, 0.95):
                if strengths.get("bypass"):
                    channel = bypass_channel(kind, p)
                else:
                    channel = solve_strengths(kind, p, **strengths)
                fast = post_selected_rho12(cfg, channel)
                slow = rho12_from_full(post_selected_rho_full(cfg, channel))
                dual_dev = max(dual_dev, float(np.max(np.abs(fast - slow))))

    if "adc" in channel_devs:
        adc_dev = max(channel_devs["adc"].values())
        adc_exact = adc_dev < 1e-9
    else:
        adc_dev = float("nan")
        adc_exact = None  # not checked on this run
    passed = initial_dev <= 1e-9 and adc_exact is not False and dual_dev <= 1e-10
    return ConformanceReport(
        n_spins=n_spins,
        initial_max_deviation=initial_dev,
        initial_conjugate_u_deviation=conjugate_dev,
        channels=channel_devs,
        adc_exact=adc_exact,
        adc_max_deviation=adc_dev,
        dual_path_max_deviation=dual_dev,
        block_residual_max=block_residual_max,
        xi3_min_vs_plain_max_gap=xi3_gap,
        zero_probability_points=zero_prob,
        passed=passed,
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinsqueeze",
        description="Squeezing and pair entanglement of a twisted spin ensemble "
                    "through weak-measurement-protected decoherence channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="sweep the decoherence strength p")
    sweep.add_argument("--channel", required=True, choices=sorted(_KIND_BY_NAME))
    sweep.add_argument("--theta", required=True, type=parse_theta,
                       help="twist angle in radians, or '<x>pi'")
    sweep.add_argument("--n-spins", required=True, type=int)
    group = sweep.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=float, help="pre-measurement strength")
    group.add_argument("--n", type=float, help="reversal strength")
    group.add_argument("--bypass", action="store_true",
                       help="no weak measurement: M = N = identity")
    sweep.add_argument("--p-grid", default="0:1:0.005", type=parse_p_grid,
                       metavar="START:STOP:STEP")
    sweep.add_argument("--source", default="closed", choices=("closed", "oracle", "both"))
    sweep.add_argument("--format", default="csv", choices=("csv", "json"), dest="fmt")
    sweep.add_argument("--out", required=True)

    figure = sub.add_parser("figure", help="run a preset curve (fig1a..fig4d)")
    figure.add_argument("figure_id", choices=sorted(_FIGURE_PRESETS))
    figure.add_argument("--out", default=None, help="default <figure_id>.csv")

    sssd = sub.add_parser("sssd", help="locate the sudden-death point p*")
    sssd.add_argument("--channel", required=True, choices=sorted(_KIND_BY_NAME))
    sssd.add_argument("--theta", required=True, type=parse_theta)
    sssd.add_argument("--n-spins", required=True, type=int)
    group = sssd.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=float)
    group.add_argument("--n", type=float)
    group.add_argument("--bypass", action="store_true")
    sssd.add_argument("--quantity", required=True, choices=_SSSD_QUANTITIES)

    ver = sub.add_parser("verify", help="closed-form vs oracle conformance report")
    ver.add_argument("--channel", action="append", choices=sorted(_KIND_BY_NAME),
                     help="restrict to a channel (repeatable; default all)")
    ver.add_argument("--n-spins", type=int, default=6)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "sweep":
        start, stop, step = args.p_grid
        spec = SweepSpec(
            kind=_KIND_BY_NAME[args.channel], theta=args.theta, n_spins=args.n_spins,
            m=args.m, n=args.n, bypass=args.bypass,
            p_start=start, p_stop=stop, p_step=step,
            source=args.source, fmt=args.fmt, out=args.out,
        )
        rows = run_sweep(spec)
        payload = rows_to_csv(rows) if spec.fmt == "csv" else rows_to_json(spec, rows)
        with open(args.out, "w") as handle:
            handle.write(payload)
        print(f"wrote {len(rows)} rows to {args.out}")
        return 0
    if args.command == "figure":
        spec = figure_preset(args.figure_id)
        out = args.out or f"{args.figure_id}.csv"
        rows = run_sweep(spec)
        with open(out, "w") as handle:
            handle.write(rows_to_csv(rows))
        print(f"wrote {len(rows)} rows to {out}")
        return 0
    if args.command == "sssd":
        try:
            root = find_sssd(
                _KIND_BY_NAME[args.channel], args.theta, args.n_spins,
                args.quantity, m=args.m, n=args.n, bypass=args.bypass,
            )
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print("none" if root is None else repr(root))
        return 0
    if args.command == "verify":
        kinds = tuple(_KIND_BY_NAME[name] for name in args.channel) if args.channel else None
        report = verify(n_spins=args.n_spins, kinds=kinds)
        print(report.to_json(), end="")
        return 0 if report.passed else 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
