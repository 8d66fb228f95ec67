"""Bound evaluation for the complex Gaussian channel.

The channel, with unit input powers and unit circularly-symmetric noises, is

    T1 = sqrt(I1) e^{j theta1} X1 + Z2
    T2 = sqrt(I2) e^{j theta2} X2 + Z1
    Y1 = sqrt(S1) X1 + T2
    Y2 = sqrt(S2) X2 + T1
    Yf = sqrt(C)  X1 + Zf

with E[X1 conj(X2)] = rho, |rho| <= 1, and Z1, Z2, Zf mutually independent
(Z2/Zf correlation is exposed as an optional knob, default 0). Differential
entropies use the complex convention h = log2 det(pi e K); every bound is a
balanced difference of such terms, so the constant cancels.

Per-correlation evaluation goes through conditional covariances (Schur
complements with pseudo-inverse conditioning so |rho| = 1 stays finite);
the closed forms are the per-term maximizations over rho.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boundset import (
    BOUND_IDS,
    ENTROPY_TERMS,
    REASON_NEEDS_FEEDBACK,
    REASON_NEEDS_LARGE_GAINS,
    BoundEntry,
    BoundSet,
)
from .errors import DomainError, NumericsError

GAUSS_VARS = ("X1", "X2", "T1", "T2", "Y1", "Y2", "Yf")
_VAR_INDEX = {name: k for k, name in enumerate(GAUSS_VARS)}

_LOG2_PI_E = math.log2(math.pi * math.e)
_EIG_FLOOR = 1e-12
_PSD_TOL = -1e-6


@dataclass(frozen=True)
class GaussianParams:
    """Link gains (linear power ratios) and interference phases (radians)."""

    s1: float
    s2: float
    i1: float
    i2: float
    c: float
    theta1: float = 0.0
    theta2: float = 0.0

    def __post_init__(self):
        for name in ("s1", "s2", "i1", "i2", "c"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v < 0.0:
                raise DomainError(f"gain {name} must be finite and >= 0, got {v!r}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "theta1", float(self.theta1))
        object.__setattr__(self, "theta2", float(self.theta2))

    @property
    def gains_above_one(self) -> bool:
        return min(self.s1, self.s2, self.i1, self.i2, self.c) > 1.0


@dataclass(frozen=True)
class JointCovariance:
    """Covariance of (X1, X2, T1, T2, Y1, Y2, Yf), entries E[V_i conj(V_j)]."""

    matrix: np.ndarray
    variables: tuple[str, ...] = GAUSS_VARS

    def __post_init__(self):
        K = np.asarray(self.matrix, dtype=complex)
        if K.shape != (len(self.variables),) * 2:
            raise DomainError(f"covariance shape {K.shape} does not match {self.variables}")
        if np.abs(K - K.conj().T).max() > 1e-12:
            raise DomainError("covariance is not Hermitian")
        eig = np.linalg.eigvalsh(K)
        if eig.min() < -1e-9:
            raise DomainError(f"covariance is not PSD (min eigenvalue {eig.min()})")
        K = K.copy()
        K.flags.writeable = False
        object.__setattr__(self, "matrix", K)


def _check_rho(rho: complex) -> complex:
    rho = complex(rho)
    if abs(rho) > 1.0 + 1e-12:
        raise DomainError(f"|rho| = {abs(rho)} exceeds 1")
    return rho


def _mixing_matrices(params: GaussianParams) -> tuple[np.ndarray, np.ndarray]:
    g1 = math.sqrt(params.i1) * np.exp(1j * params.theta1)
    g2 = math.sqrt(params.i2) * np.exp(1j * params.theta2)
    s1, s2, c = math.sqrt(params.s1), math.sqrt(params.s2), math.sqrt(params.c)
    # rows in GAUSS_VARS order; columns (X1, X2) and (Z1, Z2, Zf)
    A = np.array(
        [
            [1.0, 0.0],
            [0.0, 1.0],
            [g1, 0.0],
            [0.0, g2],
            [s1, g2],
            [g1, s2],
            [c, 0.0],
        ],
        dtype=complex,
    )
    B = np.array(
        [
            [0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )
    return A, B


def _covariance_grid(
    params: GaussianParams, rhos: np.ndarray, noise_corr: complex = 0.0
) -> np.ndarray:
    A, B = _mixing_matrices(params)
    r = np.asarray(rhos, dtype=complex).reshape(-1)
    kx = np.empty((len(r), 2, 2), dtype=complex)
    kx[:, 0, 0] = 1.0
    kx[:, 1, 1] = 1.0
    kx[:, 0, 1] = r
    kx[:, 1, 0] = r.conj()
    kz = np.eye(3, dtype=complex)
    kz[1, 2] = complex(noise_corr)
    kz[2, 1] = np.conj(noise_corr)
    K = np.einsum("ij,rjk,lk->ril", A, kx, A.conj()) + (B @ kz @ B.conj().T)[None, :, :]
    return 0.5 * (K + K.conj().swapaxes(-1, -2))


def covariance(params: GaussianParams, rho: complex, noise_corr: complex = 0.0) -> JointCovariance:
    """Covariance of the length-7 jointly Gaussian vector at input correlation rho."""
    rho = _check_rho(rho)
    if abs(complex(noise_corr)) > 1.0 + 1e-12:
        raise DomainError("|noise_corr| exceeds 1")
    return JointCovariance(_covariance_grid(params, np.array([rho]), noise_corr)[0])


def _h_cond_grid(K: np.ndarray, a: Sequence[str], b: Sequence[str]) -> np.ndarray:
    """h(a | b) in bits for every covariance in the stack ``K``."""
    a_idx = [_VAR_INDEX[n] for n in a]
    b_idx = [_VAR_INDEX[n] for n in b]
    Kaa = K[:, a_idx][:, :, a_idx]
    if b_idx:
        Kab = K[:, a_idx][:, :, b_idx]
        Kbb = K[:, b_idx][:, :, b_idx]
        w, V = np.linalg.eigh(Kbb)
        cut = np.maximum(w[..., -1], 1.0)[..., None] * 1e-12
        winv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
        pinv = (V * winv[..., None, :]) @ V.conj().swapaxes(-1, -2)
        C = Kaa - Kab @ pinv @ Kab.conj().swapaxes(-1, -2)
    else:
        C = Kaa
    C = 0.5 * (C + C.conj().swapaxes(-1, -2))
    ew = np.linalg.eigvalsh(C)
    if ew.min() < _PSD_TOL:
        raise NumericsError(
            f"conditional covariance of {tuple(a)} given {tuple(b)} has eigenvalue {ew.min()}"
        )
    ew = np.clip(ew, _EIG_FLOOR, None)
    return len(a_idx) * _LOG2_PI_E + np.log2(ew).sum(axis=-1)


def gaussian_cond_entropy(cov: JointCovariance, a, b=()) -> float:
    """Differential entropy h(a | b) = log2 det(pi e K_{a|b}) in bits."""
    a = (a,) if isinstance(a, str) else tuple(a)
    b = (b,) if isinstance(b, str) else tuple(b)
    if not a:
        raise DomainError("entropy of an empty variable set")
    if set(a) & set(b):
        raise DomainError(f"overlapping variable sets {a} and {b}")
    unknown = (set(a) | set(b)) - set(cov.variables)
    if unknown:
        raise DomainError(f"unknown variables {sorted(unknown)}")
    return float(_h_cond_grid(cov.matrix[None, :, :], a, b)[0])


def _grid_bound_values(
    params: GaussianParams, rhos: np.ndarray, noise_corr: complex = 0.0
) -> dict[str, np.ndarray]:
    """Values of all applicable bounds at every rho in ``rhos``."""
    K = _covariance_grid(params, rhos, noise_corr)
    cache: dict[tuple, np.ndarray] = {}

    def h(a: tuple[str, ...], b: tuple[str, ...]) -> np.ndarray:
        key = (frozenset(a), frozenset(b))
        if key not in cache:
            cache[key] = _h_cond_grid(K, a, b)
        return cache[key]

    out: dict[str, np.ndarray] = {}
    for bid in BOUND_IDS:
        if bid == "fb_r1_plus_two_r2":
            continue
        total = np.zeros(len(K))
        for sign, a, b in ENTROPY_TERMS[bid]:
            total = total + sign * h(a, b)
        out[bid] = np.where((total > -1e-9) & (total < 0.0), 0.0, total)
    return out


def eval_bounds_at_rho(
    params: GaussianParams, rho: complex, noise_corr: complex = 0.0
) -> BoundSet:
    """Exact per-correlation evaluation of every bound (feedback bound absent)."""
    rho = _check_rho(rho)
    values = _grid_bound_values(params, np.array([rho]), noise_corr)
    entries = {bid: BoundEntry(value=float(v[0])) for bid, v in values.items()}
    entries["fb_r1_plus_two_r2"] = BoundEntry(reason=REASON_NEEDS_FEEDBACK)
    return BoundSet(entries)


def rho_grid_values(
    params: GaussianParams,
    magnitude_steps: int = 21,
    phase_steps: int = 16,
    noise_corr: complex = 0.0,
) -> list[tuple[float, float, dict[str, float]]]:
    """Per-correlation bound values over the polar grid.

    Rows are ordered by (|rho|, phase); each carries the values of every
    applicable bound at that correlation.
    """
    if magnitude_steps < 2 or phase_steps < 1:
        raise DomainError("need magnitude_steps >= 2 and phase_steps >= 1")
    mags = np.linspace(0.0, 1.0, magnitude_steps)
    phases = np.linspace(0.0, 2.0 * math.pi, phase_steps, endpoint=False)
    grid = np.array([m * np.exp(1j * p) for m in mags for p in phases])
    values = _grid_bound_values(params, grid, noise_corr)
    rows = []
    for k in range(len(grid)):
        mi, pj = divmod(k, phase_steps)
        rows.append(
            (float(mags[mi]), float(phases[pj]), {bid: float(v[k]) for bid, v in values.items()})
        )
    return rows


def _golden_max(fn, lo: float, hi: float, iters: int = 28) -> tuple[float, float]:
    """Golden-section maximization of a scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return (c, fc) if fc >= fd else (d, fd)


def max_over_rho(
    params: GaussianParams,
    magnitude_steps: int = 21,
    phase_steps: int = 16,
    refine: bool = True,
) -> BoundSet:
    """Per-bound maximum over the polar rho grid, with the achieving rho.

    The grid is |rho| in linspace(0, 1, magnitude_steps) times phases in
    [0, 2 pi) (endpoint excluded); ties go to smaller magnitude, then
    smaller phase. A golden-section pass then refines each coordinate
    locally around the grid argmax, skipped for coordinates with fewer
    than 3 grid points (nothing to bracket).
    """
    if magnitude_steps < 2 or phase_steps < 1:
        raise DomainError("need magnitude_steps >= 2 and phase_steps >= 1")
    mags = np.linspace(0.0, 1.0, magnitude_steps)
    phases = np.linspace(0.0, 2.0 * math.pi, phase_steps, endpoint=False)
    grid = np.array([m * np.exp(1j * p) for m in mags for p in phases])
    values = _grid_bound_values(params, grid)

    entries: dict[str, BoundEntry] = {}
    for bid, vals in values.items():
        k = int(np.argmax(vals))  # first occurrence: smallest |rho| then phase
        mi, pj = divmod(k, phase_steps)
        best_v = float(vals[k])
        best_mag, best_phase = float(mags[mi]), float(phases[pj])

        if refine:
            def value_at(mag: float, phase: float) -> float:
                rho = np.array([mag * np.exp(1j * phase)])
                return float(_grid_bound_values(params, rho)[bid][0])

            if magnitude_steps >= 3:
                lo = float(mags[max(mi - 1, 0)])
                hi = float(mags[min(mi + 1, magnitude_steps - 1)])
                m_ref, v_ref = _golden_max(lambda m: value_at(m, best_phase), lo, hi)
                if v_ref > best_v:
                    best_v, best_mag = v_ref, m_ref
            if phase_steps >= 3:
                dphi = 2.0 * math.pi / phase_steps
                p_ref, v_ref = _golden_max(
                    lambda p: value_at(best_mag, p % (2.0 * math.pi)),
                    best_phase - dphi,
                    best_phase + dphi,
                )
                if v_ref > best_v:
                    best_v, best_phase = v_ref, p_ref % (2.0 * math.pi)

        entries[bid] = BoundEntry(value=best_v, rho=best_mag * np.exp(1j * best_phase))
    entries["fb_r1_plus_two_r2"] = BoundEntry(reason=REASON_NEEDS_FEEDBACK)
    return BoundSet(entries)


def closed_form_bounds(params: GaussianParams) -> BoundSet:
    """The printed closed-form relaxations, in bits.

    The noisy-front-end sum bound and the two weighted bounds are valid only
    when every gain exceeds one; below that they are reported absent.
    """
    s1, s2, i1, i2, c = params.s1, params.s2, params.i1, params.i2, params.c
    lg = np.log2

    entries: dict[str, BoundEntry] = {
        "cutset_r1_coop": BoundEntry(value=float(lg(1.0 + c + s1))),
        "cutset_r1": BoundEntry(value=float(lg(1.0 + (math.sqrt(s1) + math.sqrt(i2)) ** 2))),
        "cutset_r2": BoundEntry(value=float(lg(1.0 + s2))),
        "sum_tuni1": BoundEntry(
            value=float(
                lg(1.0 + (s1 + c) / (1.0 + i1))
                + lg(1.0 + (math.sqrt(s2) + math.sqrt(i1)) ** 2)
            )
        ),
        "sum_tuni2": BoundEntry(
            value=float(
                lg(1.0 + s2 / (1.0 + i2))
                + lg(1.0 + (math.sqrt(s1) + math.sqrt(i2)) ** 2)
            )
        ),
    }
    if params.gains_above_one:
        entries["sum_pv"] = BoundEntry(
            value=float(
                lg(1.0 + i2 + s1 / i1) + lg(1.0 + i1 / c + s2 / i2) + lg(1.0 + c) + 2.0
            )
        )
        entries["two_r1_plus_r2"] = BoundEntry(
            value=float(
                lg(1.0 + (math.sqrt(s1) + math.sqrt(i2)) ** 2)
                + lg(1.0 + c)
                + 1.0
                + lg(1.0 + s1 / (1.0 + i1 + c))
                + lg(1.0 + i1 / c + s2 / i2)
            )
        )
        entries["r1_plus_two_r2"] = BoundEntry(
            value=float(
                lg(1.0 + (math.sqrt(s2) + math.sqrt(i1)) ** 2)
                + lg(1.0 + s2 / (1.0 + i2))
                + lg(
                    1.0
                    + i2
                    + (s1 + c + i2 * c + 2.0 * math.sqrt(s1 * i2)) / (1.0 + i1)
                )
            )
        )
    else:
        for bid in ("sum_pv", "two_r1_plus_r2", "r1_plus_two_r2"):
            entries[bid] = BoundEntry(reason=REASON_NEEDS_LARGE_GAINS)
    entries["fb_r1_plus_two_r2"] = BoundEntry(reason=REASON_NEEDS_FEEDBACK)
    return BoundSet(entries)
