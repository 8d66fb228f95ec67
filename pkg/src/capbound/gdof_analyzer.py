"""Symmetric high-SNR analysis: gDoF constraint sets and regime classification.

The symmetric channel is parameterized by a base SNR S with direct gains S,
interference gains S^alpha and a cooperation gain S^beta. In the regime
alpha < 1, beta <= 1 the per-user gDoF pair (d1, d2) obeys six linear
constraints; which of the two weighted constraints actually shape the region
partitions the (alpha, beta) square into the regimes reported here.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import RegimeNotCovered
from .gaussian_engine import GaussianParams, closed_form_bounds
from .region_geometry import HalfspaceSet, equals, redundant_constraints
from .util import fmt_float, parallel_map, plus

CONSTRAINT_IDS = ("d1", "d2", "sum_a", "sum_b", "2d1+d2", "d1+2d2")

_SLOPE_TOL = 0.02


class RegimeLabel(str, enum.Enum):
    BOTH_ACTIVE = "both_active"
    ONLY_R1_PLUS_2R2_ACTIVE = "only_r1_plus_2r2_active"
    CLASSICAL_IC_EQUIVALENT = "classical_ic_equivalent"
    OUT_OF_SCOPE = "out_of_scope"


@dataclass(frozen=True)
class GdofParams:
    """Interference exponent alpha and cooperation exponent beta (both >= 0)."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0.0:
                raise RegimeNotCovered(f"{name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def in_guard(self) -> bool:
        return self.alpha < 1.0 and self.beta <= 1.0


def _require_guard(p: GdofParams) -> None:
    if not p.in_guard:
        raise RegimeNotCovered(
            f"(alpha, beta) = ({p.alpha}, {p.beta}) is outside the analyzed "
            "regime alpha < 1, beta <= 1"
        )


def gdof_region(p: GdofParams) -> HalfspaceSet:
    """The six-constraint gDoF outer bound for alpha < 1, beta <= 1."""
    _require_guard(p)
    a, b = p.alpha, p.beta
    rhs = (
        1.0,
        1.0,
        2.0 - a,
        max(a, 1.0 - a) + max(a, 1.0 + b - a),
        1.0 + plus(1.0 - max(a, b)) + max(a, 1.0 - a + b),
        2.0 - a + max(a, b, 1.0 - a),
    )
    coeffs = ((1, 0), (0, 1), (1, 1), (1, 1), (2, 1), (1, 2))
    return HalfspaceSet(
        tuple((float(c1), float(c2), r) for (c1, c2), r in zip(coeffs, rhs)),
        CONSTRAINT_IDS,
    )


def classical_ic_gdof(alpha: float) -> HalfspaceSet:
    """gDoF region of the non-cooperative channel (the equality oracle)."""
    a = float(alpha)
    if not np.isfinite(a) or a < 0.0 or a >= 1.0:
        raise RegimeNotCovered(f"classical region needs 0 <= alpha < 1, got {alpha!r}")
    w = max(a, 1.0 - a)
    rhs = (1.0, 1.0, 2.0 - a, 2.0 * w, 2.0 - a + w, 2.0 - a + w)
    coeffs = ((1, 0), (0, 1), (1, 1), (1, 1), (2, 1), (1, 2))
    return HalfspaceSet(
        tuple((float(c1), float(c2), r) for (c1, c2), r in zip(coeffs, rhs)),
        CONSTRAINT_IDS,
    )


def classical_flag(p: GdofParams) -> bool:
    """True when the region coincides with the non-cooperative one."""
    return p.beta <= plus(2.0 * p.alpha - 1.0)


@dataclass(frozen=True)
class ActivityReport:
    """Regime label plus the geometric activity classification.

    ``label`` follows the closed-form partition (both weighted bounds shape
    the region iff alpha >= max(1/2, beta)); ``active`` and ``touching``
    come from exact redundancy analysis of the polytope. Away from the
    partition boundary the two descriptions agree; on the boundary itself
    the weighted constraints degenerate to single-point touching, which is
    why the verification grid excludes a small margin around it.
    """

    label: RegimeLabel
    active: tuple[str, ...]
    touching: tuple[str, ...]

    @property
    def geometric_label(self) -> RegimeLabel:
        two_active = "2d1+d2" in self.active
        one_active = "d1+2d2" in self.active
        if two_active and one_active:
            return RegimeLabel.BOTH_ACTIVE
        if one_active and not two_active:
            return RegimeLabel.ONLY_R1_PLUS_2R2_ACTIVE
        return RegimeLabel.OUT_OF_SCOPE


def active_constraints(p: GdofParams) -> ActivityReport:
    """Classify which weighted bounds shape the gDoF region at (alpha, beta)."""
    hs = gdof_region(p)
    report = redundant_constraints(hs)
    label = (
        RegimeLabel.BOTH_ACTIVE
        if p.alpha >= max(0.5, p.beta)
        else RegimeLabel.ONLY_R1_PLUS_2R2_ACTIVE
    )
    return ActivityReport(
        label=label,
        active=tuple(CONSTRAINT_IDS[k] for k in report.active),
        touching=tuple(CONSTRAINT_IDS[k] for k in report.touching),
    )


@dataclass(frozen=True)
class RegimePoint:
    alpha: float
    beta: float
    label: RegimeLabel
    classical: bool
    active: tuple[str, ...]


def regime_map(
    alpha_grid: Sequence[float], beta_grid: Sequence[float]
) -> list[RegimePoint]:
    """One classified row per grid point, ordered by (alpha, beta).

    Out-of-guard points are labeled out_of_scope. Whenever the classical
    flag fires, the region is cross-checked for polytope equality against
    the non-cooperative oracle. Rows for different alpha values are
    independent, so the sweep honors CAPBOUND_THREADS; results are joined
    in grid order regardless of the schedule.
    """
    alphas = sorted(float(x) for x in alpha_grid)
    betas = sorted(float(x) for x in beta_grid)

    def classify_row(a: float) -> list[RegimePoint]:
        row: list[RegimePoint] = []
        for b in betas:
            p = GdofParams(a, b)
            if not p.in_guard:
                row.append(RegimePoint(a, b, RegimeLabel.OUT_OF_SCOPE, False, ()))
                continue
            rep = active_constraints(p)
            flag = classical_flag(p)
            if flag and not equals(gdof_region(p), classical_ic_gdof(a)):
                raise RegimeNotCovered(
                    f"classical-equivalence cross-check failed at ({a}, {b})"
                )
            row.append(RegimePoint(a, b, rep.label, flag, rep.active))
        return row

    return [point for row in parallel_map(classify_row, alphas) for point in row]


def regime_map_csv(rows: Sequence[RegimePoint], raw: bool = False) -> str:
    lines = ["alpha,beta,label,classical,active_ids"]
    for r in rows:
        active = ";".join(r.active)
        lines.append(
            f"{fmt_float(r.alpha, raw)},{fmt_float(r.beta, raw)},"
            f"{r.label.value},{str(r.classical).lower()},{active}"
        )
    return "\n".join(lines) + "\n"


def regime_map_summary(rows: Sequence[RegimePoint]) -> dict:
    counts = {label.value: 0 for label in RegimeLabel}
    classical = 0
    for r in rows:
        counts[r.label.value] += 1
        classical += int(r.classical)
    counts[RegimeLabel.CLASSICAL_IC_EQUIVALENT.value] = classical
    return {"points": len(rows), "counts": counts}


def gdof_coefficient(bound_id: str, alpha: float, beta: float) -> float:
    """High-SNR slope each closed-form bound must approach."""
    a, b = float(alpha), float(beta)
    if bound_id in ("cutset_r1_coop", "cutset_r1", "cutset_r2"):
        return 1.0
    if bound_id in ("sum_tuni1", "sum_tuni2"):
        return 2.0 - a
    if bound_id == "sum_pv":
        return max(a, 1.0 - a) + max(a, 1.0 + b - a)
    if bound_id == "two_r1_plus_r2":
        return 1.0 + plus(1.0 - max(a, b)) + max(a, 1.0 - a + b)
    if bound_id == "r1_plus_two_r2":
        return 2.0 - a + max(a, b, 1.0 - a)
    raise RegimeNotCovered(f"no gDoF coefficient for bound {bound_id!r}")


@dataclass(frozen=True)
class SlopeResult:
    bound_id: str
    slope: Optional[float]
    expected: float
    passed: Optional[bool]
    reason: Optional[str] = None


def slope_check(
    p: GdofParams, bound_id: str, s_low: float, s_high: float
) -> SlopeResult:
    """Empirical closed-form slope between two SNRs vs the gDoF coefficient.

    The channel is instantiated with direct gains S, interference S^alpha
    and cooperation S^beta; the slope is the bound increment divided by the
    log2-SNR increment, accepted within 0.02 of the predicted coefficient.
    """
    _require_guard(p)
    if not (s_high > s_low >= 1e6):
        raise RegimeNotCovered("need s_high > s_low >= 1e6 for slope estimation")
    expected = gdof_coefficient(bound_id, p.alpha, p.beta)

    def params_at(s: float) -> GaussianParams:
        return GaussianParams(s1=s, s2=s, i1=s**p.alpha, i2=s**p.alpha, c=s**p.beta)

    lo, hi = closed_form_bounds(params_at(s_low)), closed_form_bounds(params_at(s_high))
    lo_e, hi_e = lo[bound_id], hi[bound_id]
    if lo_e.value is None or hi_e.value is None:
        return SlopeResult(bound_id, None, expected, None, reason=lo_e.reason or hi_e.reason)
    slope = (hi_e.value - lo_e.value) / (np.log2(s_high) - np.log2(s_low))
    return SlopeResult(bound_id, float(slope), expected, bool(abs(slope - expected) <= _SLOPE_TOL))
