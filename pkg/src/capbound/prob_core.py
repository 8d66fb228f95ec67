"""Exact information measures on finite-alphabet joint distributions.

A ProbTable stores a joint probability mass function densely, indexed by the
ordinal of each symbol in its declared alphabet, which makes enumeration and
marginalization deterministic. All entropies are in bits (log base 2) with
the convention 0*log(0) = 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

import numpy as np

from .errors import DomainError

Symbol = Union[int, str, tuple]
VarSpec = Union[str, Iterable[str]]

_SUM_TOL = 1e-12      # accepted as normalized
_RENORM_TOL = 1e-9    # silently renormalized below this, rejected above


def _as_names(vars: VarSpec) -> tuple[str, ...]:
    if isinstance(vars, str):
        return (vars,)
    return tuple(vars)


@dataclass(frozen=True)
class ProbTable:
    """Joint pmf over an ordered tuple of named finite-alphabet variables.

    Fields:
        variables: variable names, in storage order.
        alphabets: per-variable symbol tuples; axis k of ``probs`` is indexed
            by the ordinal of the symbol in ``alphabets[k]``.
        probs: dense nonnegative array summing to 1.
    """

    variables: tuple[str, ...]
    alphabets: tuple[tuple[Symbol, ...], ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        names = tuple(self.variables)
        if len(names) == 0:
            raise DomainError("a ProbTable needs at least one variable")
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate variable names in {names}")
        alphabets = tuple(tuple(a) for a in self.alphabets)
        if len(alphabets) != len(names):
            raise DomainError("one alphabet per variable is required")
        for name, alpha in zip(names, alphabets):
            if len(alpha) == 0:
                raise DomainError(f"alphabet of {name} is empty")
            if len(set(alpha)) != len(alpha):
                raise DomainError(f"alphabet of {name} has repeated symbols")
        probs = np.asarray(self.probs, dtype=float)
        shape = tuple(len(a) for a in alphabets)
        if probs.shape != shape:
            raise DomainError(f"probs shape {probs.shape} does not match alphabets {shape}")
        if probs.min() < -1e-15:
            raise DomainError(f"negative probability {probs.min()}")
        probs = np.where(probs < 0.0, 0.0, probs)
        total = float(probs.sum())
        if abs(total - 1.0) > _RENORM_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        if abs(total - 1.0) > _SUM_TOL:
            probs = probs / total
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "variables", names)
        object.__setattr__(self, "alphabets", alphabets)
        object.__setattr__(self, "probs", probs)

    # ------------------------------------------------------------------ build
    @classmethod
    def from_mass(
        cls,
        variables: Sequence[str],
        alphabets: Sequence[Sequence[Symbol]],
        mass: Mapping[tuple, float],
    ) -> "ProbTable":
        """Build from a sparse {symbol tuple: probability} map."""
        variables = tuple(variables)
        alphabets = tuple(tuple(a) for a in alphabets)
        index = [{sym: k for k, sym in enumerate(a)} for a in alphabets]
        probs = np.zeros(tuple(len(a) for a in alphabets))
        for key, p in mass.items():
            key = tuple(key) if isinstance(key, (tuple, list)) else (key,)
            if len(key) != len(variables):
                raise DomainError(f"tuple {key!r} has arity {len(key)}, expected {len(variables)}")
            try:
                idx = tuple(index[k][sym] for k, sym in enumerate(key))
            except KeyError as exc:
                raise DomainError(f"symbol {exc.args[0]!r} in {key!r} is not in its alphabet") from exc
            probs[idx] += float(p)
        return cls(variables, alphabets, probs)

    @classmethod
    def uniform(cls, variables: Sequence[str], alphabets: Sequence[Sequence[Symbol]]) -> "ProbTable":
        alphabets = tuple(tuple(a) for a in alphabets)
        shape = tuple(len(a) for a in alphabets)
        return cls(tuple(variables), alphabets, np.full(shape, 1.0 / np.prod(shape)))

    # ---------------------------------------------------------------- inspect
    def alphabet(self, name: str) -> tuple[Symbol, ...]:
        return self.alphabets[self._axis(name)]

    def atoms(self) -> Iterator[tuple[tuple, float]]:
        """Yield (symbol tuple, probability) for every nonzero atom."""
        for idx in np.argwhere(self.probs > 0.0):
            key = tuple(self.alphabets[k][i] for k, i in enumerate(idx))
            yield key, float(self.probs[tuple(idx)])

    @property
    def mass(self) -> dict[tuple, float]:
        return dict(self.atoms())

    def _axis(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise DomainError(f"unknown variable {name!r}; table has {self.variables}") from None

    def _resolve(self, vars: VarSpec, allow_empty: bool = False) -> tuple[int, ...]:
        names = _as_names(vars)
        if len(names) == 0:
            if allow_empty:
                return ()
            raise DomainError("variable selection is empty")
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate names in selection {names}")
        return tuple(self._axis(n) for n in names)

    # -------------------------------------------------------------- operations
    def marginal(self, keep: VarSpec) -> "ProbTable":
        """Sum out every variable not in ``keep``; result stays normalized."""
        axes = set(self._resolve(keep))
        drop = tuple(k for k in range(len(self.variables)) if k not in axes)
        probs = self.probs.sum(axis=drop) if drop else self.probs
        kept = tuple(k for k in range(len(self.variables)) if k in axes)
        return ProbTable(
            tuple(self.variables[k] for k in kept),
            tuple(self.alphabets[k] for k in kept),
            probs,
        )

    def entropy(self, vars: VarSpec) -> float:
        """H(vars) in bits over the marginal on ``vars``."""
        axes = set(self._resolve(vars))
        drop = tuple(k for k in range(len(self.variables)) if k not in axes)
        p = self.probs.sum(axis=drop) if drop else self.probs
        p = p[p > 0.0]
        return float(-(p * np.log2(p)).sum())

    def conditional_entropy(self, a: VarSpec, b: VarSpec = ()) -> float:
        """H(a | b) = H(a, b) - H(b); an empty ``b`` reduces to H(a)."""
        a_names = _as_names(a)
        b_names = _as_names(b)
        self._resolve(a_names)
        if not b_names:
            return self.entropy(a_names)
        self._resolve(b_names)
        if set(a_names) & set(b_names):
            raise DomainError(f"conditioning sets overlap: {a_names} vs {b_names}")
        return self.entropy(a_names + b_names) - self.entropy(b_names)

    def mutual_information(self, a: VarSpec, b: VarSpec, given: VarSpec = ()) -> float:
        """I(a; b | given) = H(a | given) - H(a | b, given)."""
        a_names, b_names, g_names = _as_names(a), _as_names(b), _as_names(given)
        groups = a_names + b_names + g_names
        if len(set(groups)) != len(groups):
            raise DomainError("a, b and given must be pairwise disjoint")
        return self.conditional_entropy(a_names, g_names) - self.conditional_entropy(
            a_names, b_names + g_names
        )


# Free-function aliases for the operation names used throughout the project.
def marginalize(joint: ProbTable, keep: VarSpec) -> ProbTable:
    return joint.marginal(keep)


def entropy(joint: ProbTable, vars: VarSpec) -> float:
    return joint.entropy(vars)


def conditional_entropy(joint: ProbTable, a: VarSpec, b: VarSpec = ()) -> float:
    return joint.conditional_entropy(a, b)


def mutual_information(joint: ProbTable, a: VarSpec, b: VarSpec, given: VarSpec = ()) -> float:
    return joint.mutual_information(a, b, given)
