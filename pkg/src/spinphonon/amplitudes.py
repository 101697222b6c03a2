"""Complex virtual-state amplitudes for two- and three-phonon transitions.

The two-phonon amplitude sums one energy denominator over all intermediate
system states; the three-phonon amplitude sums two denominators over all
intermediate-state pairs. Denominators are regularized as x -> x + i eta.
Both amplitudes are exactly linear in each coupling matrix, and the global
coupling multiplier enters as a final factor (scale**2 and scale**3) so
rescaling is exact in floating point.
"""

from __future__ import annotations

import warnings

import numpy as np

from .core import (
    ABSORB,
    EMIT,
    CouplingSet,
    NearResonantDenominatorWarning,
    PhononBath,
    SpinSystem,
)


def _check_state(index: int, n_states: int, name: str) -> None:
    if not 0 <= index < n_states:
        raise IndexError(f"state index {name}={index} out of range [0, {n_states})")


def _check_mode(index: int, n_modes: int, name: str) -> None:
    if not 0 <= index < n_modes:
        raise IndexError(f"mode index {name}={index} out of range [0, {n_modes})")


def _check_sign(sign: int) -> None:
    if sign not in (ABSORB, EMIT):
        raise ValueError("sign must be ABSORB (-1) or EMIT (+1)")


def _warn_near_resonance(min_abs: float, eta: float) -> None:
    if min_abs < eta / 10.0:
        warnings.warn(
            f"amplitude denominator within eta/10 of zero "
            f"(|x| = {min_abs:.3e} cm^-1, eta = {eta:g} cm^-1); "
            "the result is regularized but eta-sensitive",
            NearResonantDenominatorWarning,
            stacklevel=3,
        )


def amp2(
    b: int,
    a: int,
    alpha: int,
    beta: int,
    sign: int,
    system: SpinSystem,
    bath: PhononBath,
    couplings: CouplingSet,
    eta: float,
) -> complex:
    """Single-intermediate-state amplitude of a two-phonon process.

    Returns sum_c V^alpha_bc V^beta_ca / (E_c - E_a + sign * omega_beta
    + i eta), times the squared global coupling multiplier. The second
    mode of the ordering (beta, applied first) is the one whose frequency
    enters the denominator.
    """
    n = system.n_states
    _check_state(b, n, "b")
    _check_state(a, n, "a")
    _check_mode(alpha, bath.n_modes, "alpha")
    _check_mode(beta, bath.n_modes, "beta")
    _check_sign(sign)
    if not eta > 0.0:
        raise ValueError("eta must be positive")

    v = couplings.matrices
    real_den = (system.energies - system.energies[a]) + sign * bath.frequencies[beta]
    _warn_near_resonance(float(np.min(np.abs(real_den))), eta)
    denom = real_den + 1j * eta
    value = np.sum(v[alpha][b, :] * v[beta][:, a] / denom)
    return complex(value * couplings.scale**2)


def amp3(
    b: int,
    a: int,
    ordering: tuple[int, int, int],
    signs: tuple[int, int],
    system: SpinSystem,
    bath: PhononBath,
    couplings: CouplingSet,
    eta: float,
) -> complex:
    """Double-intermediate-state amplitude of a three-phonon process.

    ``ordering`` = (mu, nu, xi) lists the mode indices from outermost to
    first applied; ``signs`` = (s_nu, s_xi) are the frequency signs of the
    two modes that reach the denominators. Returns

        sum_cd V^mu_bc V^nu_cd V^xi_da /
            [(E_c - E_a + s_nu w_nu + s_xi w_xi + i eta)
             (E_d - E_a + s_xi w_xi + i eta)]

    times the cubed global coupling multiplier. The outermost mode mu
    never appears in a denominator.
    """
    n = system.n_states
    _check_state(b, n, "b")
    _check_state(a, n, "a")
    if len(ordering) != 3 or len(signs) != 2:
        raise ValueError("ordering must list 3 modes and signs 2 entries")
    mu, nu, xi = ordering
    for name, idx in zip(("mu", "nu", "xi"), ordering):
        _check_mode(idx, bath.n_modes, name)
    s_nu, s_xi = signs
    _check_sign(s_nu)
    _check_sign(s_xi)
    if not eta > 0.0:
        raise ValueError("eta must be positive")

    v = couplings.matrices
    d_e = system.energies - system.energies[a]
    real1 = d_e + (s_nu * bath.frequencies[nu] + s_xi * bath.frequencies[xi])
    real2 = d_e + s_xi * bath.frequencies[xi]
    _warn_near_resonance(
        min(float(np.min(np.abs(real1))), float(np.min(np.abs(real2)))), eta
    )
    den1 = real1 + 1j * eta
    den2 = real2 + 1j * eta
    # sum_d V^nu_cd V^xi_da / den2_d, then contract over c with V^mu_bc / den1_c
    inner = v[nu] @ (v[xi][:, a] / den2)
    value = np.sum((v[mu][b, :] / den1) * inner)
    return complex(value * couplings.scale**3)
