"""Population-transfer rates at second, fourth, and sixth perturbative order.

Each order produces one rate per absorb/emit channel. The one-phonon rate
is a plain mode sum; the two- and three-phonon rates sum squared
symmetrized amplitudes (all orderings of the participating modes) over
index-ordered pairs and triples. Pair and triple sums are pruned with the
windowed lineshape: only combinations whose energy mismatch lies inside
window * sigma can contribute, and the admissible third index is located
by binary search on the sorted mode frequencies.

Surviving triples are evaluated vectorized in fixed-size chunks, and the
chunk partial sums are reduced in chunk order. The chunk boundaries do not
depend on the thread count, so results are bit-identical for any
``threads`` value; ``threads=1`` is the strictly sequential reference
mode.
"""

from __future__ import annotations

import itertools
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    BOLTZMANN_CM_PER_K,
    CM_TO_RATE_S,
    EMIT,
    CouplingSet,
    Lineshape,
    NearResonantDenominatorWarning,
    PhononBath,
    SignPattern,
    SpinSystem,
    _EXP_ARG_MAX,
    sign_patterns,
)

#: Triples (and pairs) are evaluated in fixed chunks of this many entries.
#: The value is part of the determinism contract: it must not depend on
#: the thread count or the machine.
CHUNK = 4096

_PERMS3 = tuple(itertools.permutations((0, 1, 2)))
_PERMS2 = ((0, 1), (1, 0))

_TWO_PI = 2.0 * np.pi


class TripleIndex(NamedTuple):
    """Strictly ordered mode-index triple alpha < beta < gamma."""

    alpha: int
    beta: int
    gamma: int


@dataclass(frozen=True, eq=False)
class RateBreakdown:
    """Per-channel decomposition of one transition rate.

    ``per_channel`` maps each sign pattern of the order to its rate in
    s^-1; ``total`` is their sum, accumulated in canonical channel order.
    """

    order: int
    per_channel: dict[SignPattern, float]
    total: float

    def channel(self, label: str) -> float:
        """Rate of the channel with the given '+'/'-' label, in s^-1."""
        return self.per_channel[SignPattern.from_label(label)]


def _breakdown(order: int, values: dict[SignPattern, float]) -> RateBreakdown:
    total = 0.0
    ordered = {}
    for pattern in sign_patterns(order // 2):
        v = values[pattern]
        ordered[pattern] = v
        total += v
    return RateBreakdown(order=order, per_channel=ordered, total=total)


def _check_transition(b: int, a: int, n_states: int) -> None:
    if not (0 <= b < n_states and 0 <= a < n_states):
        raise IndexError(f"state indices ({b}, {a}) out of range [0, {n_states})")
    if b == a:
        raise ValueError(
            "b must differ from a; diagonal entries are assembled by the "
            "dynamics module"
        )


def _occupations(frequencies: np.ndarray, temperature: float) -> np.ndarray:
    """Bose occupations per mode; exact 0 where the exponent underflows."""
    if not temperature > 0.0:
        raise ValueError("temperature must be positive")
    x = frequencies / (BOLTZMANN_CM_PER_K * temperature)
    out = np.zeros_like(x)
    small = x <= _EXP_ARG_MAX
    out[small] = 1.0 / np.expm1(x[small])
    return out


def _weights(mismatch: np.ndarray, shape: Lineshape) -> np.ndarray:
    """Vectorized lineshape weight with the exact window cut."""
    out = np.zeros_like(mismatch)
    inside = np.abs(mismatch) <= shape.halfwidth
    d = mismatch[inside]
    s = shape.sigma
    if shape.kind == "gaussian":
        out[inside] = np.exp(-0.5 * (d / s) ** 2) / (s * np.sqrt(2.0 * np.pi))
    else:
        out[inside] = (s / np.pi) / (d * d + s * s)
    return out


# ---------------------------------------------------------------------------
# one-phonon


def rate_one_phonon(
    b: int,
    a: int,
    system: SpinSystem,
    bath: PhononBath,
    couplings: CouplingSet,
    temperature: float,
    shape: Lineshape,
) -> RateBreakdown:
    """Direct-process rate R_ba, split into emission and absorption.

    Each channel is 2 pi sum_alpha |V^alpha_ba|^2 times the channel weight
    (Bose factor and broadened delta at omega_ba + s omega_alpha),
    converted to s^-1.
    """
    _check_transition(b, a, system.n_states)
    omega_ba = system.transition_frequency(b, a)
    freqs = bath.frequencies
    v2 = np.abs(couplings.matrices[:, b, a]) ** 2
    occ = _occupations(freqs, temperature)
    channels: dict[SignPattern, float] = {}
    for pattern in sign_patterns(1):
        s = pattern.signs[0]
        factor = occ + 1.0 if s == EMIT else occ
        wts = _weights(omega_ba + s * freqs, shape)
        base = float(np.sum(v2 * (factor * wts)))
        channels[pattern] = _TWO_PI * base * couplings.scale**2 * CM_TO_RATE_S
    return _breakdown(2, channels)


# ---------------------------------------------------------------------------
# pruning


def _expand_windows(
    base: np.ndarray,
    partner_index: np.ndarray,
    start: np.ndarray,
    stop: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Expand per-row [start, stop) index windows into flat (row, col) pairs."""
    counts = np.maximum(stop - start, 0)
    keep = counts > 0
    if not np.any(keep):
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    starts = start[keep]
    cnts = counts[keep]
    rows = np.repeat(partner_index[keep], cnts)
    offsets = np.arange(cnts.sum(), dtype=np.int64) - np.repeat(
        np.cumsum(cnts) - cnts, cnts
    )
    cols = np.repeat(starts, cnts) + offsets
    return rows, cols


def _prune_pairs(
    omega_ba: float, pattern: SignPattern, bath: PhononBath, shape: Lineshape
) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs i < j whose mismatch |omega_ba + s_i w_i + s_j w_j| <= window."""
    freqs = bath.frequencies
    m = bath.n_modes
    empty = np.zeros(0, dtype=np.int64)
    if m < 2:
        return empty, empty
    s0, s1 = pattern.signs
    half = shape.halfwidth
    out_i: list[np.ndarray] = []
    out_j: list[np.ndarray] = []
    for i in range(m - 1):
        base = omega_ba + s0 * freqs[i]
        # admissible s1 * w_j lies in [-half - base, half - base]
        if s1 == EMIT:
            lo, hi = -half - base, half - base
        else:
            lo, hi = base - half, base + half
        j0 = int(np.searchsorted(freqs, lo, side="left"))
        j1 = int(np.searchsorted(freqs, hi, side="right"))
        j0 = max(j0, i + 1)
        if j0 >= j1:
            continue
        js = np.arange(j0, j1, dtype=np.int64)
        mismatch = base + s1 * freqs[js]
        js = js[np.abs(mismatch) <= half]
        if js.size:
            out_i.append(np.full(js.size, i, dtype=np.int64))
            out_j.append(js)
    if not out_i:
        return empty, empty
    return np.concatenate(out_i), np.concatenate(out_j)


def _prune_triples_arrays(
    omega_ba: float, pattern: SignPattern, bath: PhononBath, shape: Lineshape
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    freqs = bath.frequencies
    m = bath.n_modes
    empty = np.zeros(0, dtype=np.int64)
    if m < 3:
        return empty, empty, empty
    s0, s1, s2 = pattern.signs
    half = shape.halfwidth
    out_a: list[np.ndarray] = []
    out_b: list[np.ndarray] = []
    out_g: list[np.ndarray] = []
    for i in range(m - 2):
        base = omega_ba + s0 * freqs[i]
        js = np.arange(i + 1, m - 1, dtype=np.int64)
        partial = base + s1 * freqs[js]
        if s2 == EMIT:
            lo, hi = -half - partial, half - partial
        else:
            lo, hi = partial - half, partial + half
        g0 = np.searchsorted(freqs, lo, side="left")
        g1 = np.searchsorted(freqs, hi, side="right")
        g0 = np.maximum(g0, js + 1)
        rows, gammas = _expand_windows(partial, js, g0, g1)
        if not rows.size:
            continue
        # rows holds the j index; recompute the mismatch with the exact
        # left-fold association used by the scalar channel weight
        mismatch = (base + s1 * freqs[rows]) + s2 * freqs[gammas]
        keep = np.abs(mismatch) <= half
        if np.any(keep):
            rows = rows[keep]
            gammas = gammas[keep]
            out_a.append(np.full(rows.size, i, dtype=np.int64))
            out_b.append(rows)
            out_g.append(gammas)
    if not out_a:
        return empty, empty, empty
    return np.concatenate(out_a), np.concatenate(out_b), np.concatenate(out_g)


def prune_triples(
    omega_ba: float, pattern: SignPattern, bath: PhononBath, shape: Lineshape
) -> list[TripleIndex]:
    """Enumerate the mode triples alpha < beta < gamma inside the window.

    Returns exactly the triples with |omega_ba + sum_i s_i omega_i| <=
    window * sigma, in lexicographic order, duplicate-free. The third
    index range is located by binary search on the sorted frequencies and
    then filtered with the exact window condition.
    """
    if len(pattern) != 3:
        raise ValueError("triple pruning requires a three-phonon sign pattern")
    ai, bi, gi = _prune_triples_arrays(omega_ba, pattern, bath, shape)
    return [TripleIndex(int(x), int(y), int(z)) for x, y, z in zip(ai, bi, gi)]


# ---------------------------------------------------------------------------
# chunked deterministic reduction


def _chunk_ranges(n: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + CHUNK, n)) for lo in range(0, n, CHUNK)]


def _reduce_chunks(task, n: int, threads: int) -> tuple[float, float]:
    """Sum task(lo, hi) over fixed chunks, reducing in chunk order.

    ``task`` returns (partial_sum, min_abs_denominator). The reduction
    order never depends on the thread count, so the result is bit-stable.
    """
    ranges = _chunk_ranges(n)
    if threads > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: task(*r), ranges))
    else:
        results = [task(lo, hi) for lo, hi in ranges]
    total = 0.0
    min_abs = np.inf
    for partial, chunk_min in results:
        total += partial
        min_abs = min(min_abs, chunk_min)
    return total, min_abs


# ---------------------------------------------------------------------------
# two-phonon


def _pair_chunk_sum(
    b: int,
    a: int,
    idx_i: np.ndarray,
    idx_j: np.ndarray,
    signs: tuple[int, int],
    weights: np.ndarray,
    d_e: np.ndarray,
    freqs: np.ndarray,
    v: np.ndarray,
    eta: float,
    lo: int,
    hi: int,
) -> tuple[float, float]:
    sel = (idx_i[lo:hi], idx_j[lo:hi])
    w_sel = (freqs[sel[0]], freqs[sel[1]])
    amp = np.zeros(hi - lo, dtype=complex)
    min_abs = np.inf
    for p, q in _PERMS2:
        real_den = d_e[None, :] + (signs[q] * w_sel[q])[:, None]
        min_abs = min(min_abs, float(np.min(np.abs(real_den))))
        den = real_den + 1j * eta
        amp += np.einsum("tc,tc->t", v[sel[p]][:, b, :], v[sel[q]][:, :, a] / den)
    contrib = (amp.real**2 + amp.imag**2) * weights[lo:hi]
    return float(np.sum(contrib)), min_abs


def rate_two_phonon(
    b: int,
    a: int,
    system: SpinSystem,
    bath: PhononBath,
    couplings: CouplingSet,
    temperature: float,
    shape: Lineshape,
    threads: int = 1,
) -> RateBreakdown:
    """Raman-process rate R_ba over the four two-phonon channels.

    Each channel sums, over index-ordered mode pairs inside the lineshape
    window, the squared modulus of the symmetrized amplitude (both
    orderings of the pair) times the channel weight. Equal-index pairs are
    excluded by the strict ordering.
    """
    _check_transition(b, a, system.n_states)
    omega_ba = system.transition_frequency(b, a)
    freqs = bath.frequencies
    v = couplings.matrices
    d_e = np.asarray(system.energies - system.energies[a])
    occ = _occupations(freqs, temperature)
    eta = shape.eta

    channels: dict[SignPattern, float] = {}
    min_abs_all = np.inf
    for pattern in sign_patterns(2):
        idx_i, idx_j = _prune_pairs(omega_ba, pattern, bath, shape)
        if not idx_i.size:
            channels[pattern] = 0.0
            continue
        s0, s1 = pattern.signs
        f0 = occ[idx_i] + 1.0 if s0 == EMIT else occ[idx_i]
        f1 = occ[idx_j] + 1.0 if s1 == EMIT else occ[idx_j]
        mismatch = (omega_ba + s0 * freqs[idx_i]) + s1 * freqs[idx_j]
        weights = (f0 * f1) * _weights(mismatch, shape)

        def task(lo: int, hi: int) -> tuple[float, float]:
            return _pair_chunk_sum(
                b, a, idx_i, idx_j, pattern.signs, weights, d_e, freqs, v, eta, lo, hi
            )

        base, min_abs = _reduce_chunks(task, idx_i.size, threads)
        min_abs_all = min(min_abs_all, min_abs)
        channels[pattern] = _TWO_PI * base * couplings.scale**4 * CM_TO_RATE_S
    if min_abs_all < eta / 10.0:
        warnings.warn(
            f"two-phonon amplitude denominator within eta/10 of zero "
            f"(|x| = {min_abs_all:.3e} cm^-1)",
            NearResonantDenominatorWarning,
            stacklevel=2,
        )
    return _breakdown(4, channels)


# ---------------------------------------------------------------------------
# three-phonon


def _triple_chunk_sum(
    b: int,
    a: int,
    idx: tuple[np.ndarray, np.ndarray, np.ndarray],
    signs: tuple[int, int, int],
    weights: np.ndarray,
    d_e: np.ndarray,
    freqs: np.ndarray,
    v: np.ndarray,
    eta: float,
    lo: int,
    hi: int,
) -> tuple[float, float]:
    sel = tuple(ix[lo:hi] for ix in idx)
    w_sel = tuple(freqs[s] for s in sel)
    amp = np.zeros(hi - lo, dtype=complex)
    min_abs = np.inf
    for p, q, r in _PERMS3:
        shift1 = signs[q] * w_sel[q] + signs[r] * w_sel[r]
        shift2 = signs[r] * w_sel[r]
        real1 = d_e[None, :] + shift1[:, None]
        real2 = d_e[None, :] + shift2[:, None]
        min_abs = min(
            min_abs,
            float(np.min(np.abs(real1))),
            float(np.min(np.abs(real2))),
        )
        den1 = real1 + 1j * eta
        den2 = real2 + 1j * eta
        right = v[sel[r]][:, :, a] / den2
        inner = np.einsum("tcd,td->tc", v[sel[q]], right)
        amp += np.einsum("tc,tc->t", v[sel[p]][:, b, :], inner / den1)
    contrib = (amp.real**2 + amp.imag**2) * weights[lo:hi]
    return float(np.sum(contrib)), min_abs


def rate_three_phonon(
    b: int,
    a: int,
    system: SpinSystem,
    bath: PhononBath,
    couplings: CouplingSet,
    temperature: float,
    shape: Lineshape,
    threads: int = 1,
) -> RateBreakdown:
    """Three-phonon rate R_ba over the eight sign channels.

    Each channel sums, over pruned triples alpha < beta < gamma, the
    squared modulus of the six-ordering amplitude (one two-denominator
    term per permutation of the triple, with frequency signs fixed by the
    channel) times the channel weight. Outputs are bit-identical for any
    thread count.
    """
    _check_transition(b, a, system.n_states)
    omega_ba = system.transition_frequency(b, a)
    freqs = bath.frequencies
    v = couplings.matrices
    d_e = np.asarray(system.energies - system.energies[a])
    occ = _occupations(freqs, temperature)
    eta = shape.eta

    channels: dict[SignPattern, float] = {}
    min_abs_all = np.inf
    for pattern in sign_patterns(3):
        idx = _prune_triples_arrays(omega_ba, pattern, bath, shape)
        if not idx[0].size:
            channels[pattern] = 0.0
            continue
        factors = np.ones(idx[0].size)
        mismatch = np.full(idx[0].size, omega_ba)
        for s, ix in zip(pattern.signs, idx):
            n = occ[ix]
            factors = factors * (n + 1.0 if s == EMIT else n)
            mismatch = mismatch + s * freqs[ix]
        weights = factors * _weights(mismatch, shape)

        def task(lo: int, hi: int) -> tuple[float, float]:
            return _triple_chunk_sum(
                b, a, idx, pattern.signs, weights, d_e, freqs, v, eta, lo, hi
            )

        base, min_abs = _reduce_chunks(task, idx[0].size, threads)
        min_abs_all = min(min_abs_all, min_abs)
        channels[pattern] = _TWO_PI * base * couplings.scale**6 * CM_TO_RATE_S
    if min_abs_all < eta / 10.0:
        warnings.warn(
            f"three-phonon amplitude denominator within eta/10 of zero "
            f"(|x| = {min_abs_all:.3e} cm^-1)",
            NearResonantDenominatorWarning,
            stacklevel=2,
        )
    return _breakdown(6, channels)


_RATE_FUNCTIONS = {
    2: rate_one_phonon,
    4: rate_two_phonon,
    6: rate_three_phonon,
}


def rate_at_order(
    order: int,
    b: int,
    a: int,
    system: SpinSystem,
    bath: PhononBath,
    couplings: CouplingSet,
    temperature: float,
    shape: Lineshape,
    threads: int = 1,
) -> RateBreakdown:
    """Dispatch to the rate of the given perturbative order (2, 4, or 6)."""
    if order == 2:
        return rate_one_phonon(b, a, system, bath, couplings, temperature, shape)
    try:
        fn = _RATE_FUNCTIONS[order]
    except KeyError:
        raise ValueError(f"order must be 2, 4, or 6, got {order}") from None
    return fn(b, a, system, bath, couplings, temperature, shape, threads=threads)
