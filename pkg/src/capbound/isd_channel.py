"""Finite-alphabet injective semi-deterministic channels with one-way cooperation.

A channel is specified by two noisy front ends, P(Yf, T1 | X1) and
P(T2 | X2), and three function tables

    Y1  = f1(X1, T2)    invertible in T2 for every fixed X1,
    Y2  = f2(X2, T1)    invertible in T1 for every fixed X2,
    YF2 = f3(X2, Yf)    invertible in Yf for every fixed X2,

where YF2 is the signal overheard by the cooperating sender. Because YF2
enters every bound conditioned on X2, the evaluator works with Yf directly
and YF2 never appears in the joint table.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .boundset import (
    BOUND_IDS,
    ENTROPY_TERMS,
    REASON_NEEDS_FEEDBACK,
    BoundEntry,
    BoundSet,
)
from .errors import DomainError, PreconditionError
from .prob_core import ProbTable, Symbol

JOINT_VARS = ("X1", "X2", "Yf", "T1", "T2", "Y1", "Y2")

GENERALIZED = "generalized"
OUTPUT_FEEDBACK = "output_feedback"

_MAX_LDC_LEVEL = 3


def _symbol_key(sym: Symbol):
    return (0, sym) if isinstance(sym, (int, float)) else (1, str(sym))


@dataclass(frozen=True)
class IsdChannelSpec:
    """Alphabets, front-end transition tables and combining function tables.

    ``frontend1`` maps x1 -> {(yf, t1): prob}; ``frontend2`` maps
    x2 -> {t2: prob}. Function tables are total maps keyed by input pairs.
    """

    x1_alphabet: tuple[Symbol, ...]
    x2_alphabet: tuple[Symbol, ...]
    yf_alphabet: tuple[Symbol, ...]
    t1_alphabet: tuple[Symbol, ...]
    t2_alphabet: tuple[Symbol, ...]
    frontend1: Mapping[Symbol, Mapping[tuple, float]]
    frontend2: Mapping[Symbol, Mapping[Symbol, float]]
    f1: Mapping[tuple, Symbol]
    f2: Mapping[tuple, Symbol]
    f3: Mapping[tuple, Symbol]
    feedback_mode: str = GENERALIZED

    def __post_init__(self):
        for name in ("x1", "x2", "yf", "t1", "t2"):
            alpha = tuple(getattr(self, f"{name}_alphabet"))
            if not alpha:
                raise DomainError(f"{name} alphabet is empty")
            if len(set(alpha)) != len(alpha):
                raise DomainError(f"{name} alphabet has repeated symbols")
            object.__setattr__(self, f"{name}_alphabet", alpha)
        if self.feedback_mode not in (GENERALIZED, OUTPUT_FEEDBACK):
            raise DomainError(f"unknown feedback_mode {self.feedback_mode!r}")

    def y1_alphabet(self) -> tuple[Symbol, ...]:
        return tuple(sorted(set(self.f1.values()), key=_symbol_key))

    def y2_alphabet(self) -> tuple[Symbol, ...]:
        return tuple(sorted(set(self.f2.values()), key=_symbol_key))


@dataclass(frozen=True)
class Violation:
    kind: str            # "normalization" | "injectivity" | "missing" | "output_feedback"
    location: str        # which table / row
    witness: tuple = ()  # first offending symbols
    message: str = ""

    def __str__(self):
        return f"{self.kind} at {self.location}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def first(self) -> Optional[Violation]:
        return self.violations[0] if self.violations else None


def validate(spec: IsdChannelSpec) -> ValidationReport:
    """Check every structural invariant; collect violations with witnesses."""
    out: list[Violation] = []

    def check_row(table: str, row_key, dist: Mapping, symbols: set):
        total = 0.0
        for key, p in dist.items():
            p = float(p)
            if p < 0.0:
                out.append(
                    Violation("normalization", f"{table}[{row_key!r}]", (key,),
                              f"negative probability {p} at {key!r}")
                )
                return
            if key not in symbols:
                out.append(
                    Violation("missing", f"{table}[{row_key!r}]", (key,),
                              f"symbol {key!r} outside the declared alphabets")
                )
                return
            total += p
        if abs(total - 1.0) > 1e-9:
            out.append(
                Violation("normalization", f"{table}[{row_key!r}]", (),
                          f"row sums to {total!r}")
            )

    fe1_keys = {(yf, t1) for yf in spec.yf_alphabet for t1 in spec.t1_alphabet}
    for x1 in spec.x1_alphabet:
        row = spec.frontend1.get(x1)
        if row is None:
            out.append(Violation("missing", f"frontend1[{x1!r}]", (x1,), "row missing"))
            continue
        check_row("frontend1", x1, {tuple(k): v for k, v in row.items()}, fe1_keys)
    for x2 in spec.x2_alphabet:
        row = spec.frontend2.get(x2)
        if row is None:
            out.append(Violation("missing", f"frontend2[{x2!r}]", (x2,), "row missing"))
            continue
        check_row("frontend2", x2, dict(row), set(spec.t2_alphabet))

    def check_injective(table_name: str, table: Mapping, fixed_alpha, var_alpha, var_name: str):
        for fixed in fixed_alpha:
            seen: dict[Symbol, Symbol] = {}
            for v in var_alpha:
                key = (fixed, v)
                if key not in table:
                    out.append(
                        Violation("missing", f"{table_name}[{key!r}]", key, "table entry missing")
                    )
                    return
                y = table[key]
                if y in seen:
                    out.append(
                        Violation(
                            "injectivity",
                            table_name,
                            (fixed, seen[y], v),
                            f"{table_name}({fixed!r}, {seen[y]!r}) == "
                            f"{table_name}({fixed!r}, {v!r}) == {y!r}; "
                            f"not injective in {var_name}",
                        )
                    )
                    return
                seen[y] = v

    check_injective("f1", spec.f1, spec.x1_alphabet, spec.t2_alphabet, "T2")
    check_injective("f2", spec.f2, spec.x2_alphabet, spec.t1_alphabet, "T1")
    check_injective("f3", spec.f3, spec.x2_alphabet, spec.yf_alphabet, "Yf")

    if spec.feedback_mode == OUTPUT_FEEDBACK and not out:
        # Case precondition: the overheard signal must equal receiver 2's
        # output on the support of the first front end.
        for x1 in spec.x1_alphabet:
            for (yf, t1), p in spec.frontend1[x1].items():
                if float(p) <= 0.0:
                    continue
                for x2 in spec.x2_alphabet:
                    if spec.f3[(x2, yf)] != spec.f2[(x2, t1)]:
                        out.append(
                            Violation(
                                "output_feedback",
                                "f3",
                                (x1, x2, yf, t1),
                                f"f3({x2!r}, {yf!r}) != f2({x2!r}, {t1!r}) on a "
                                "positive-probability front-end outcome",
                            )
                        )
                        return ValidationReport(tuple(out))

    return ValidationReport(tuple(out))


def ensure_valid(spec: IsdChannelSpec) -> None:
    report = validate(spec)
    if not report.ok:
        raise DomainError(f"invalid channel spec: {report.first}")


def yf_t1_correlated(spec: IsdChannelSpec, tol: float = 1e-12) -> bool:
    """True when some P(Yf, T1 | x1) row is not a product distribution."""
    for x1 in spec.x1_alphabet:
        row = {tuple(k): float(v) for k, v in spec.frontend1[x1].items()}
        p_yf: dict[Symbol, float] = {}
        p_t1: dict[Symbol, float] = {}
        for (yf, t1), p in row.items():
            p_yf[yf] = p_yf.get(yf, 0.0) + p
            p_t1[t1] = p_t1.get(t1, 0.0) + p
        for yf in spec.yf_alphabet:
            for t1 in spec.t1_alphabet:
                joint = row.get((yf, t1), 0.0)
                if abs(joint - p_yf.get(yf, 0.0) * p_t1.get(t1, 0.0)) > tol:
                    return True
    return False


# --------------------------------------------------------------------- inputs
def uniform_inputs(spec: IsdChannelSpec) -> ProbTable:
    return ProbTable.uniform(("X1", "X2"), (spec.x1_alphabet, spec.x2_alphabet))


def point_mass_inputs(spec: IsdChannelSpec, x1: Symbol, x2: Symbol) -> ProbTable:
    return ProbTable.from_mass(
        ("X1", "X2"), (spec.x1_alphabet, spec.x2_alphabet), {(x1, x2): 1.0}
    )


def inputs_from_mass(spec: IsdChannelSpec, mass: Mapping[tuple, float]) -> ProbTable:
    return ProbTable.from_mass(("X1", "X2"), (spec.x1_alphabet, spec.x2_alphabet), mass)


def _check_inputs(spec: IsdChannelSpec, p: ProbTable) -> None:
    if p.variables != ("X1", "X2"):
        raise DomainError(f"input distribution must be over ('X1', 'X2'), got {p.variables}")
    if p.alphabets != (spec.x1_alphabet, spec.x2_alphabet):
        raise DomainError("input distribution alphabets do not match the channel spec")


# ---------------------------------------------------------------------- joint
def joint_distribution(spec: IsdChannelSpec, p: ProbTable) -> ProbTable:
    """Joint law of (X1, X2, Yf, T1, T2, Y1, Y2) under input law ``p``."""
    ensure_valid(spec)
    _check_inputs(spec, p)
    y1_alpha = spec.y1_alphabet()
    y2_alpha = spec.y2_alphabet()
    alphabets = (
        spec.x1_alphabet, spec.x2_alphabet, spec.yf_alphabet,
        spec.t1_alphabet, spec.t2_alphabet, y1_alpha, y2_alpha,
    )
    idx = [{sym: k for k, sym in enumerate(a)} for a in alphabets]
    probs = np.zeros(tuple(len(a) for a in alphabets))
    for (x1, x2), p_in in p.atoms():
        fe1 = spec.frontend1[x1]
        fe2 = spec.frontend2[x2]
        for (yf, t1), p1 in fe1.items():
            p1 = float(p1)
            if p1 <= 0.0:
                continue
            y2 = spec.f2[(x2, t1)]
            base = p_in * p1
            for t2, p2 in fe2.items():
                p2 = float(p2)
                if p2 <= 0.0:
                    continue
                y1 = spec.f1[(x1, t2)]
                probs[
                    idx[0][x1], idx[1][x2], idx[2][yf],
                    idx[3][t1], idx[4][t2], idx[5][y1], idx[6][y2],
                ] += base * p2
    return ProbTable(JOINT_VARS, alphabets, probs)


# --------------------------------------------------------------------- bounds
def _eval_terms(joint: ProbTable, terms) -> float:
    cache: dict[frozenset, float] = {}

    def H(names: tuple[str, ...]) -> float:
        key = frozenset(names)
        if key not in cache:
            cache[key] = joint.entropy(tuple(key))
        return cache[key]

    total = 0.0
    for sign, a, b in terms:
        h = H(a + b) - H(b) if b else H(a)
        total += sign * h
    # Exact values are nonnegative; clip double-rounding dust only.
    if -1e-12 < total < 0.0:
        total = 0.0
    return total


def eval_bounds(spec: IsdChannelSpec, p: ProbTable) -> BoundSet:
    """Evaluate all nine bound expressions on the exact joint distribution.

    The output-feedback bound is reported absent unless the spec declares
    ``feedback_mode = output_feedback``.
    """
    joint = joint_distribution(spec, p)
    entries: dict[str, BoundEntry] = {}
    for bid in BOUND_IDS:
        if bid == "fb_r1_plus_two_r2" and spec.feedback_mode != OUTPUT_FEEDBACK:
            entries[bid] = BoundEntry(reason=REASON_NEEDS_FEEDBACK)
            continue
        entries[bid] = BoundEntry(value=_eval_terms(joint, ENTROPY_TERMS[bid]))
    return BoundSet(entries)


def eval_feedback_bound(spec: IsdChannelSpec, p: ProbTable) -> float:
    """Value of the output-feedback R1 + 2 R2 bound, in bits."""
    if spec.feedback_mode != OUTPUT_FEEDBACK:
        raise PreconditionError(
            "the R1 + 2 R2 feedback bound " + REASON_NEEDS_FEEDBACK,
            reason=REASON_NEEDS_FEEDBACK,
        )
    joint = joint_distribution(spec, p)
    return _eval_terms(joint, ENTROPY_TERMS["fb_r1_plus_two_r2"])


# --------------------------------------------------------------- maximization
def maximize_bound(
    spec: IsdChannelSpec,
    bound_id: str,
    budget: int,
    seed: int = 42,
    restarts: int = 64,
) -> tuple[ProbTable, float]:
    """Maximize one bound over joint input distributions.

    Deterministic given ``seed``: a uniform start followed by seeded
    Dirichlet(1) restarts, each refined by cyclic coordinate ascent with
    step halving (stop at relative improvement < 1e-6). ``budget`` caps the
    total number of bound evaluations; the candidate stream does not depend
    on the budget, so a larger budget never returns a smaller value.
    """
    ensure_valid(spec)
    if bound_id not in BOUND_IDS:
        raise DomainError(f"unknown bound id {bound_id!r}")
    if bound_id == "fb_r1_plus_two_r2" and spec.feedback_mode != OUTPUT_FEEDBACK:
        raise PreconditionError(
            "cannot maximize the feedback bound on this spec",
            reason=REASON_NEEDS_FEEDBACK,
        )
    if budget < 1:
        raise DomainError("budget must be at least 1")

    n1, n2 = len(spec.x1_alphabet), len(spec.x2_alphabet)
    n = n1 * n2
    terms = ENTROPY_TERMS[bound_id]

    evals = 0

    def evaluate(w: np.ndarray) -> float:
        nonlocal evals
        evals += 1
        table = ProbTable(("X1", "X2"), (spec.x1_alphabet, spec.x2_alphabet), w.reshape(n1, n2))
        return _eval_terms(joint_distribution(spec, table), terms)

    rng = np.random.default_rng(seed)
    starts = [np.full(n, 1.0 / n)]
    starts += [rng.dirichlet(np.ones(n)) for _ in range(max(0, restarts - 1))]

    best_w = starts[0]
    best_v = -np.inf

    for w0 in starts:
        if evals >= budget:
            break
        w = w0.copy()
        v = evaluate(w)
        if v > best_v:
            best_v, best_w = v, w.copy()
        step = 0.25
        while step >= 1e-4 and evals < budget:
            cycle_start = v
            moves = [(i, sign) for i in range(n) for sign in (1.0, -1.0)]
            for i, sign in moves:
                if evals >= budget:
                    break
                cand = w.copy()
                cand[i] = max(0.0, cand[i] + sign * step)
                total = cand.sum()
                if total <= 0.0:
                    continue
                cand /= total
                if np.abs(cand - w).max() < 1e-15:
                    continue
                v2 = evaluate(cand)
                if v2 > v + 1e-13:
                    w, v = cand, v2
                    if v > best_v:
                        best_v, best_w = v, w.copy()
            if v - cycle_start < 1e-6 * max(1.0, abs(cycle_start)):
                step *= 0.5

    dist = ProbTable(("X1", "X2"), (spec.x1_alphabet, spec.x2_alphabet), best_w.reshape(n1, n2))
    return dist, float(best_v)


# ------------------------------------------------------- linear deterministic
def ldc_instance(n_direct: int, n_interf: int, n_coop: int) -> IsdChannelSpec:
    """Built-in symmetric linear deterministic channel at desk scale.

    Inputs are length-q bit vectors (stored as integers, q = max level).
    T1 and T2 are the top ``n_interf`` bits of the respective input, Yf the
    top ``n_coop`` bits of X1, and Y1 = downshift(X1, q - n_direct) XOR T2
    (Y2 symmetrically). All levels must be <= 3.
    """
    for name, lvl in (("n_direct", n_direct), ("n_interf", n_interf), ("n_coop", n_coop)):
        if not isinstance(lvl, (int, np.integer)) or lvl < 0:
            raise DomainError(f"{name} must be a nonnegative integer")
        if lvl > _MAX_LDC_LEVEL:
            raise DomainError(f"{name}={lvl} exceeds the desk-scale cap {_MAX_LDC_LEVEL}")
    q = max(n_direct, n_interf, n_coop)
    x_alpha = tuple(range(2 ** q))
    t_alpha = tuple(range(2 ** n_interf))
    yf_alpha = tuple(range(2 ** n_coop))

    def top_bits(x: int, levels: int) -> int:
        return x >> (q - levels) if levels > 0 else 0

    frontend1 = {
        x1: {(top_bits(x1, n_coop), top_bits(x1, n_interf)): 1.0} for x1 in x_alpha
    }
    frontend2 = {x2: {top_bits(x2, n_interf): 1.0} for x2 in x_alpha}
    f1 = {(x1, t2): (x1 >> (q - n_direct)) ^ t2 for x1 in x_alpha for t2 in t_alpha}
    f2 = {(x2, t1): (x2 >> (q - n_direct)) ^ t1 for x2 in x_alpha for t1 in t_alpha}
    f3 = {(x2, yf): yf for x2 in x_alpha for yf in yf_alpha}
    return IsdChannelSpec(
        x1_alphabet=x_alpha,
        x2_alphabet=x_alpha,
        yf_alphabet=yf_alpha,
        t1_alphabet=t_alpha,
        t2_alphabet=t_alpha,
        frontend1=frontend1,
        frontend2=frontend2,
        f1=f1,
        f2=f2,
        f3=f3,
        feedback_mode=GENERALIZED,
    )


# ----------------------------------------------------------------- spec files
def _parse_prob(raw, where: str) -> float:
    if isinstance(raw, str):
        try:
            return float(raw)
        except ValueError:
            raise DomainError(f"{where}: {raw!r} is not a decimal probability") from None
    if isinstance(raw, (int, float)):
        return float(raw)
    raise DomainError(f"{where}: probability must be a decimal string, got {type(raw).__name__}")


def _parse_symbol(raw) -> Symbol:
    if isinstance(raw, (int, str)):
        return raw
    raise DomainError(f"symbols must be integers or strings, got {raw!r}")


def spec_from_json_obj(doc: dict) -> IsdChannelSpec:
    """Parse the channel-spec document (see README for the schema)."""
    if not isinstance(doc, dict):
        raise DomainError("channel spec must be a JSON object")
    for key in ("alphabets", "frontend1", "frontend2", "f1", "f2", "f3"):
        if key not in doc:
            raise DomainError(f"channel spec is missing the {key!r} field")
    alpha_doc = doc["alphabets"]
    alphas: dict[str, tuple] = {}
    for name in ("x1", "x2", "yf", "t1", "t2"):
        if name not in alpha_doc:
            raise DomainError(f"alphabets: missing {name!r}")
        alphas[name] = tuple(_parse_symbol(s) for s in alpha_doc[name])

    def rows(field_name: str, arity: int):
        entries = doc[field_name]
        if not isinstance(entries, list):
            raise DomainError(f"{field_name} must be a list of rows")
        for k, row in enumerate(entries):
            if not isinstance(row, list) or len(row) != arity:
                raise DomainError(f"{field_name}[{k}]: expected a row of {arity} entries")
            yield k, row

    frontend1: dict = {x1: {} for x1 in alphas["x1"]}
    for k, (x1, yf, t1, p) in rows("frontend1", 4):
        x1, yf, t1 = _parse_symbol(x1), _parse_symbol(yf), _parse_symbol(t1)
        if x1 not in frontend1:
            raise DomainError(f"frontend1[{k}]: x1 symbol {x1!r} not in alphabet")
        frontend1[x1][(yf, t1)] = _parse_prob(p, f"frontend1[{k}]")
    frontend2: dict = {x2: {} for x2 in alphas["x2"]}
    for k, (x2, t2, p) in rows("frontend2", 3):
        x2, t2 = _parse_symbol(x2), _parse_symbol(t2)
        if x2 not in frontend2:
            raise DomainError(f"frontend2[{k}]: x2 symbol {x2!r} not in alphabet")
        frontend2[x2][t2] = _parse_prob(p, f"frontend2[{k}]")

    def fun_table(field_name: str):
        table: dict = {}
        for k, (a, b, y) in rows(field_name, 3):
            table[(_parse_symbol(a), _parse_symbol(b))] = _parse_symbol(y)
        return table

    mode = doc.get("feedback_mode", GENERALIZED)
    return IsdChannelSpec(
        x1_alphabet=alphas["x1"],
        x2_alphabet=alphas["x2"],
        yf_alphabet=alphas["yf"],
        t1_alphabet=alphas["t1"],
        t2_alphabet=alphas["t2"],
        frontend1=frontend1,
        frontend2=frontend2,
        f1=fun_table("f1"),
        f2=fun_table("f2"),
        f3=fun_table("f3"),
        feedback_mode=mode,
    )


def load_channel_spec(path: str) -> IsdChannelSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read channel spec {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"channel spec {path} is not valid JSON: {exc}") from exc
    return spec_from_json_obj(doc)


def spec_to_json_obj(spec: IsdChannelSpec) -> dict:
    """Inverse of spec_from_json_obj; probabilities become decimal strings."""
    return {
        "alphabets": {
            "x1": list(spec.x1_alphabet),
            "x2": list(spec.x2_alphabet),
            "yf": list(spec.yf_alphabet),
            "t1": list(spec.t1_alphabet),
            "t2": list(spec.t2_alphabet),
        },
        "frontend1": [
            [x1, yf, t1, repr(float(p))]
            for x1 in spec.x1_alphabet
            for (yf, t1), p in sorted(spec.frontend1[x1].items(), key=lambda kv: _pair_key(kv[0]))
            if float(p) > 0.0
        ],
        "frontend2": [
            [x2, t2, repr(float(p))]
            for x2 in spec.x2_alphabet
            for t2, p in sorted(spec.frontend2[x2].items(), key=_symbol_key)
            if float(p) > 0.0
        ],
        "f1": [[a, b, y] for (a, b), y in sorted(spec.f1.items(), key=lambda kv: _pair_key(kv[0]))],
        "f2": [[a, b, y] for (a, b), y in sorted(spec.f2.items(), key=lambda kv: _pair_key(kv[0]))],
        "f3": [[a, b, y] for (a, b), y in sorted(spec.f3.items(), key=lambda kv: _pair_key(kv[0]))],
        "feedback_mode": spec.feedback_mode,
    }


def _pair_key(pair: tuple):
    a, b = pair
    return (_symbol_key(a), _symbol_key(b))


def load_input_dist(path: str, spec: IsdChannelSpec) -> ProbTable:
    """Read {"inputs": [[x1, x2, prob], ...]} into an input distribution."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DomainError(f"cannot read input distribution {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"input distribution {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "inputs" not in doc:
        raise DomainError(f"{path}: expected an object with an 'inputs' field")
    mass: dict[tuple, float] = {}
    for k, row in enumerate(doc["inputs"]):
        if not isinstance(row, list) or len(row) != 3:
            raise DomainError(f"inputs[{k}]: expected [x1, x2, prob]")
        x1, x2, p = row
        mass[(_parse_symbol(x1), _parse_symbol(x2))] = _parse_prob(p, f"inputs[{k}]")
    return inputs_from_mass(spec, mass)
