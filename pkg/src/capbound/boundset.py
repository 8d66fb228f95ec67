"""Bound identifiers, their entropy-term decompositions, and evaluated sets.

Every outer bound handled by the toolkit is a signed sum of conditional
entropies H(a | b) over the seven channel variables (X1, X2, Yf, T1, T2,
Y1, Y2). The decompositions below are shared by the exact finite-alphabet
evaluator and the Gaussian evaluator; only the entropy backend differs.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import DomainError

X1, X2, YF, T1, T2, Y1, Y2 = "X1", "X2", "Yf", "T1", "T2", "Y1", "Y2"

#: Canonical bound identifiers, in reporting order.
BOUND_IDS = (
    "cutset_r1_coop",      # R1 with the cooperation link inside the cut
    "cutset_r1",           # R1, both senders on the cut's source side
    "cutset_r2",           # R2 given the other input
    "sum_tuni1",           # R1 + R2, receiver-2 side information form
    "sum_tuni2",           # R1 + R2, receiver-1 side information form
    "sum_pv",              # R1 + R2 via the noisy front-end variables
    "two_r1_plus_r2",      # 2 R1 + R2
    "r1_plus_two_r2",      # R1 + 2 R2
    "fb_r1_plus_two_r2",   # R1 + 2 R2, output-feedback channels only
)

#: (coefficient of R1, coefficient of R2) for each bound as a halfspace.
RATE_COEFFS: dict[str, tuple[int, int]] = {
    "cutset_r1_coop": (1, 0),
    "cutset_r1": (1, 0),
    "cutset_r2": (0, 1),
    "sum_tuni1": (1, 1),
    "sum_tuni2": (1, 1),
    "sum_pv": (1, 1),
    "two_r1_plus_r2": (2, 1),
    "r1_plus_two_r2": (1, 2),
    "fb_r1_plus_two_r2": (1, 2),
}

REASON_NEEDS_FEEDBACK = "requires output feedback"
REASON_NEEDS_LARGE_GAINS = "requires all channel gains larger than one"

# Signed conditional-entropy terms (sign, a, b) with value = sum sign*H(a|b).
Term = tuple[int, tuple[str, ...], tuple[str, ...]]

ENTROPY_TERMS: dict[str, tuple[Term, ...]] = {
    # I(X1; Y1, Yf | X2)
    "cutset_r1_coop": (
        (+1, (Y1, YF), (X2,)),
        (-1, (Y1, YF), (X1, X2)),
    ),
    # I(X1, X2; Y1)
    "cutset_r1": (
        (+1, (Y1,), ()),
        (-1, (Y1,), (X1, X2)),
    ),
    # I(X2; Y2 | X1)
    "cutset_r2": (
        (+1, (Y2,), (X1,)),
        (-1, (Y2,), (X1, X2)),
    ),
    # I(X1; Y1, Yf | Y2, X2) + I(X1, X2; Y2)
    "sum_tuni1": (
        (+1, (Y1, YF), (Y2, X2)),
        (-1, (Y1, YF), (Y2, X1, X2)),
        (+1, (Y2,), ()),
        (-1, (Y2,), (X1, X2)),
    ),
    # I(X2; Y2 | Y1, X1) + I(X1, X2; Y1)
    "sum_tuni2": (
        (+1, (Y2,), (Y1, X1)),
        (-1, (Y2,), (Y1, X1, X2)),
        (+1, (Y1,), ()),
        (-1, (Y1,), (X1, X2)),
    ),
    # H(Y1|T1,Yf) - H(Y1|T1,Yf,X1,X2) + H(Y2|T2,Yf) - H(Y2|T2,Yf,X1,X2)
    #   + I(Yf; X1, X2 | T2)
    "sum_pv": (
        (+1, (Y1,), (T1, YF)),
        (-1, (Y1,), (T1, YF, X1, X2)),
        (+1, (Y2,), (T2, YF)),
        (-1, (Y2,), (T2, YF, X1, X2)),
        (+1, (YF,), (T2,)),
        (-1, (YF,), (T2, X1, X2)),
    ),
    "two_r1_plus_r2": (
        (+1, (Y1,), ()),
        (-1, (Y1,), (X1, X2)),
        (+1, (Y1,), (T1, YF, X2)),
        (-1, (Y1,), (T1, YF, X1, X2)),
        (+1, (Y2,), (T2, YF)),
        (-1, (Y2,), (T2, YF, X1, X2)),
        (+1, (YF,), (T2,)),
        (-1, (YF,), (T2, X1, X2)),
    ),
    "r1_plus_two_r2": (
        (+1, (Y2,), ()),
        (-1, (Y2,), (X1, X2)),
        (+1, (Y2,), (T2, YF, X1)),
        (-1, (Y2,), (T2, YF, X1, X2)),
        (+1, (Y1, YF), (T1,)),
        (-1, (Y1, YF), (X1, X2, T1)),
    ),
    # Output feedback only.
    "fb_r1_plus_two_r2": (
        (+1, (Y2,), ()),
        (-1, (Y2,), (X1, X2)),
        (+1, (Y2,), (Y1, X1)),
        (-1, (Y2,), (Y1, X1, X2)),
        (+1, (Y1,), (T1,)),
        (-1, (Y1,), (T1, X1, X2)),
    ),
}


@dataclass(frozen=True)
class BoundEntry:
    """Evaluated value of one bound, or the reason it is not applicable.

    ``rho`` carries the maximizing input correlation when the entry came out
    of a sweep over correlation coefficients.
    """

    value: Optional[float] = None
    reason: Optional[str] = None
    rho: Optional[complex] = None

    def __post_init__(self):
        if (self.value is None) == (self.reason is None):
            raise DomainError("a BoundEntry carries exactly one of value / reason")
        if self.value is not None:
            v = float(self.value)
            if v < 0.0:
                if v < -1e-9:
                    raise DomainError(f"negative bound value {v}")
                v = 0.0
            object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class BoundSet:
    """Values (bits) of the outer bounds, keyed by bound id."""

    entries: Mapping[str, BoundEntry]

    def __post_init__(self):
        unknown = set(self.entries) - set(BOUND_IDS)
        if unknown:
            raise DomainError(f"unknown bound ids {sorted(unknown)}")
        ordered = {bid: self.entries[bid] for bid in BOUND_IDS if bid in self.entries}
        object.__setattr__(self, "entries", ordered)

    def __getitem__(self, bound_id: str) -> BoundEntry:
        if bound_id not in self.entries:
            raise DomainError(f"bound id {bound_id!r} not in this set")
        return self.entries[bound_id]

    def value(self, bound_id: str) -> float:
        entry = self[bound_id]
        if entry.value is None:
            raise DomainError(f"{bound_id} is not applicable: {entry.reason}")
        return entry.value

    @property
    def present(self) -> dict[str, float]:
        return {bid: e.value for bid, e in self.entries.items() if e.value is not None}

    def as_dict(self) -> dict:
        """Plain structure for JSON export, in canonical id order."""
        out: dict = {}
        for bid, e in self.entries.items():
            if e.value is None:
                out[bid] = {"absent": e.reason}
            else:
                cell: dict = {"value": e.value}
                if e.rho is not None:
                    cell["rho_mag"] = abs(e.rho)
                    cell["rho_phase"] = float(_phase(e.rho))
                out[bid] = cell
        return out


def _phase(z: complex) -> float:
    import cmath

    p = cmath.phase(z)
    if p < 0.0:
        p += 2.0 * cmath.pi
    return p
