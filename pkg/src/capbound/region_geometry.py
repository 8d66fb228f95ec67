"""Two-dimensional rate-region polytopes from halfspace descriptions.

Constraints are a1*R1 + a2*R2 <= b with nonnegative coefficients, on top of
the implicit axes R1 >= 0, R2 >= 0. Vertices come from exact pairwise line
intersection plus feasibility filtering; with at most a handful of
constraints this is both exact and fast, so no LP machinery is needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .boundset import RATE_COEFFS, BoundSet
from .errors import BoundednessError, DomainError, NumericsError

TOL = 1e-9


@dataclass(frozen=True)
class HalfspaceSet:
    """Constraints a1*R1 + a2*R2 <= b; ``labels`` optionally names them."""

    constraints: tuple[tuple[float, float, float], ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        rows = []
        for k, row in enumerate(self.constraints):
            a1, a2, b = (float(v) for v in row)
            if not (np.isfinite(a1) and np.isfinite(a2) and np.isfinite(b)):
                raise DomainError(f"constraint {k} has non-finite entries")
            if a1 < 0.0 or a2 < 0.0:
                raise DomainError(f"constraint {k} has negative coefficients")
            if a1 == 0.0 and a2 == 0.0:
                raise DomainError(f"constraint {k} has zero coefficients")
            rows.append((a1, a2, b))
        object.__setattr__(self, "constraints", tuple(rows))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(rows):
                raise DomainError("one label per constraint is required")
            object.__setattr__(self, "labels", labels)

    def without(self, index: int) -> "HalfspaceSet":
        rows = tuple(r for k, r in enumerate(self.constraints) if k != index)
        labels = None
        if self.labels is not None:
            labels = tuple(s for k, s in enumerate(self.labels) if k != index)
        return HalfspaceSet(rows, labels)

    def label(self, index: int) -> str:
        if self.labels is not None:
            return self.labels[index]
        return str(index)


@dataclass(frozen=True)
class RatePolytope:
    """Counterclockwise vertex ring plus the non-redundant constraint ids."""

    vertices: tuple[tuple[float, float], ...]
    active_ids: tuple[int, ...]
    touching_ids: tuple[int, ...] = ()


@dataclass(frozen=True)
class RedundancyReport:
    redundant: tuple[int, ...]   # removal leaves the vertex set unchanged
    touching: tuple[int, ...]    # removal-invariant but tight at one point
    active: tuple[int, ...]      # removal changes the region


def _arrays(hs: HalfspaceSet) -> tuple[np.ndarray, np.ndarray]:
    if not hs.constraints:
        raise BoundednessError("R1")
    A = np.array([(a1, a2) for a1, a2, _ in hs.constraints], dtype=float)
    b = np.array([b for _, _, b in hs.constraints], dtype=float)
    if not (A[:, 0] > 0.0).any():
        raise BoundednessError("R1")
    if not (A[:, 1] > 0.0).any():
        raise BoundednessError("R2")
    return A, b


@lru_cache(maxsize=64)
def _pair_indices(m: int) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(m, k=1)


def _vertex_array(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    """All feasible pairwise intersections (including the axes), deduplicated."""
    Af = np.vstack([A, [[-1.0, 0.0], [0.0, -1.0]]])
    bf = np.concatenate([b, [0.0, 0.0]])
    m = len(bf)
    ii, jj = _pair_indices(m)
    a_i, a_j = Af[ii], Af[jj]
    det = a_i[:, 0] * a_j[:, 1] - a_i[:, 1] * a_j[:, 0]
    ok = np.abs(det) > 1e-12
    a_i, a_j, det = a_i[ok], a_j[ok], det[ok]
    b_i, b_j = bf[ii][ok], bf[jj][ok]
    x = (b_i * a_j[:, 1] - b_j * a_i[:, 1]) / det
    y = (a_i[:, 0] * b_j - a_j[:, 0] * b_i) / det
    pts = np.column_stack([x, y])
    feas = (Af @ pts.T <= bf[:, None] + TOL).all(axis=0)
    pts = pts[feas]
    if len(pts) == 0:
        return pts.reshape(0, 2)
    # Deduplicate on a 1e-9 grid but keep full-precision representatives.
    rounded = np.round(pts, 9) + 0.0
    _, keep = np.unique(rounded, axis=0, return_index=True)
    return pts[np.sort(keep)] + 0.0


def _order_ring(pts: np.ndarray) -> np.ndarray:
    """Counterclockwise ring starting from the (max R1, min R2) vertex."""
    if len(pts) <= 1:
        return pts
    if len(pts) == 2:
        order = np.lexsort((pts[:, 1], -pts[:, 0]))
        return pts[order]
    center = pts.mean(axis=0)
    angles = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    pts = pts[np.argsort(angles, kind="stable")]
    start = min(range(len(pts)), key=lambda k: (-pts[k, 0], pts[k, 1]))
    return np.roll(pts, -start, axis=0)


def _enumerate(hs: HalfspaceSet) -> np.ndarray:
    A, b = _arrays(hs)
    pts = _order_ring(_vertex_array(A, b))
    if len(pts):
        slack = A @ pts.T - b[:, None]
        if slack.max() > 10 * TOL or pts.min() < -10 * TOL:
            raise NumericsError("vertex feasibility check failed")
    return pts


def _same_vertex_set(p: np.ndarray, q: np.ndarray) -> bool:
    if len(p) != len(q):
        return False
    if len(p) == 0:
        return True
    ps = p[np.lexsort((p[:, 1], p[:, 0]))]
    qs = q[np.lexsort((q[:, 1], q[:, 0]))]
    return bool(np.abs(ps - qs).max() <= TOL)


def _classify(hs: HalfspaceSet) -> tuple[np.ndarray, RedundancyReport]:
    pts = _enumerate(hs)
    A, b = _arrays(hs)
    redundant: list[int] = []
    touching: list[int] = []
    active: list[int] = []
    for i in range(len(hs.constraints)):
        tight_any = len(pts) > 0 and bool((np.abs(A[i] @ pts.T - b[i]) <= TOL).any())
        if len(pts) and not tight_any:
            # Slack at every vertex means slack on the whole polytope.
            redundant.append(i)
            continue
        if len(hs.constraints) == 1:
            active.append(i)
            continue
        try:
            rest = _enumerate(hs.without(i))
        except BoundednessError:
            # Removing the only cap on a direction changes the region.
            active.append(i)
            continue
        if not _same_vertex_set(pts, rest):
            active.append(i)
            continue
        if len(pts) == 0:
            redundant.append(i)
            continue
        n_tight = int((np.abs(A[i] @ rest.T - b[i]) <= TOL).sum()) if len(rest) else 0
        if n_tight == 1:
            touching.append(i)
        else:
            redundant.append(i)
    report = RedundancyReport(tuple(redundant), tuple(touching), tuple(active))
    return pts, report


def vertices(hs: HalfspaceSet) -> RatePolytope:
    """Vertex ring (counterclockwise from max-R1/min-R2) and active ids."""
    pts, report = _classify(hs)
    return RatePolytope(
        vertices=tuple((float(x), float(y)) for x, y in pts),
        active_ids=report.active,
        touching_ids=report.touching,
    )


def redundant_constraints(hs: HalfspaceSet) -> RedundancyReport:
    """Classify every constraint as active, redundant, or single-point touching."""
    _, report = _classify(hs)
    return report


def contains(outer: HalfspaceSet, inner: HalfspaceSet) -> tuple[bool, Optional[tuple[float, float]]]:
    """True when every vertex of ``inner`` satisfies ``outer``; else a witness."""
    A, b = _arrays(outer)
    for vx, vy in _enumerate(inner):
        if (A @ np.array([vx, vy]) > b + TOL).any():
            return False, (float(vx), float(vy))
    return True, None


def equals(first: HalfspaceSet, second: HalfspaceSet) -> bool:
    return contains(first, second)[0] and contains(second, first)[0]


def area(hs: HalfspaceSet) -> float:
    """Shoelace area of the region (0 for points and segments)."""
    pts = _enumerate(hs)
    if len(pts) < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))) / 2.0)


def from_bound_set(bs: BoundSet) -> HalfspaceSet:
    """Halfspace description of the (R1, R2) region cut out by a bound set."""
    rows = []
    labels = []
    for bid, entry in bs.entries.items():
        if entry.value is None:
            continue
        a1, a2 = RATE_COEFFS[bid]
        rows.append((float(a1), float(a2), entry.value))
        labels.append(bid)
    return HalfspaceSet(tuple(rows), tuple(labels))


def polytope_json_obj(hs: HalfspaceSet, poly: RatePolytope) -> dict:
    return {
        "constraints": [
            {"id": hs.label(k), "a1": a1, "a2": a2, "b": b}
            for k, (a1, a2, b) in enumerate(hs.constraints)
        ],
        "vertices": [[x, y] for x, y in poly.vertices],
        "active_ids": [hs.label(k) for k in poly.active_ids],
        "touching_ids": [hs.label(k) for k in poly.touching_ids],
        "area": area(hs),
    }


def vertices_csv(poly: RatePolytope, raw: bool = False) -> str:
    from .util import fmt_float

    lines = ["R1,R2"]
    for x, y in poly.vertices:
        lines.append(f"{fmt_float(x, raw)},{fmt_float(y, raw)}")
    return "\n".join(lines) + "\n"
