"""Closed-form rotating-wave results for the bath-engineered cooling scheme.

Everything here is analytic: the optically induced damping of mode b, the
mode susceptibilities, the frequency pull and induced damping of mode a,
the effective occupation and its optimum over the optomechanical
cooperativity, and the thermomechanical force-noise density.

The closed forms assume a degenerate, sideband-resolved, hierarchical
regime.  Rather than refusing to evaluate near the regime edges, results
carry boolean validity flags computed with a threshold factor of 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import KB
from .model import SystemSpec, thermal_occupation

__all__ = [
    "RegimeFlags",
    "CoolingSummary",
    "ForceNoiseResult",
    "OccupationResult",
    "optical_damping",
    "chi_b",
    "chi_a",
    "mode_a_response",
    "induced_damping",
    "induced_damping_detuned",
    "cooperativity_ab",
    "optomechanical_cooperativity",
    "n_eff_closed_form",
    "optimal_cooperativity",
    "cooling_limit_ratio",
    "narrowed_linewidth",
    "force_noise_psd",
    "cooling_summary",
]

REGIME_FACTOR = 10.0


@dataclass(frozen=True)
class RegimeFlags:
    """Validity flags for the closed-form results (True = inside regime).

    degenerate : |omega_a - omega_b| small against gamma_b + Gamma
    sideband   : cavity broad against the damped-b linewidth and the
                 pump tuned near the lower motional sideband
    hierarchy  : (gamma_b + Gamma)/gamma_a large against C_ab
    cooperative: C_ab large against 1
    """

    degenerate: bool
    sideband: bool
    hierarchy: bool
    cooperative: bool

    @property
    def ok(self) -> bool:
        return self.degenerate and self.sideband and self.hierarchy and self.cooperative


@dataclass(frozen=True)
class CoolingSummary:
    """All closed-form figures of merit for one operating point."""

    Gamma: float
    Gamma_a: float
    C_ab: float
    C_OM: float
    n_eff: float
    linewidth_a: float
    omega_a_pulled: float
    flags: RegimeFlags


@dataclass(frozen=True)
class ForceNoiseResult:
    """Thermal force noise on mode a.

    ``s_ff`` is the one-sided classical-limit density in N^2/Hz; ``factor``
    is the dimensionless bracket multiplying the bare m*gamma_a*kB*T.
    ``classical`` records whether nbar >> 1 holds (threshold factor 10).
    """

    s_ff: float
    factor: float
    classical: bool


class OccupationResult(float):
    """A float occupation that also carries regime validity flags."""

    flags: RegimeFlags

    def __new__(cls, value: float, flags: RegimeFlags):
        obj = super().__new__(cls, value)
        obj.flags = flags
        return obj


def regime_flags(spec: SystemSpec, Gamma: float) -> RegimeFlags:
    gtot = spec.mode_b.gamma + Gamma
    delta_ab = abs(spec.mode_a.omega - spec.mode_b.omega)
    cab = cooperativity_ab(spec)
    kappa = spec.cavity.kappa
    sideband = (kappa >= REGIME_FACTOR * gtot) and (
        abs(spec.cavity.detuning + spec.mode_b.omega) * REGIME_FACTOR <= kappa / 2
    )
    hierarchy = (
        spec.mode_a.gamma == 0.0 or gtot / spec.mode_a.gamma >= REGIME_FACTOR * cab
    )
    return RegimeFlags(
        degenerate=delta_ab * REGIME_FACTOR <= gtot,
        sideband=sideband,
        hierarchy=hierarchy,
        cooperative=cab >= REGIME_FACTOR,
    )


def optical_damping(alpha_g0: float, kappa: float) -> float:
    """Optically induced damping of mode b: Gamma = 4|alpha*g0|^2/kappa."""
    if not kappa > 0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    return 4.0 * abs(alpha_g0) ** 2 / kappa


def chi_b(omega, spec: SystemSpec, Gamma: float):
    """Susceptibility of mode b with optical damping included.

    chi_b(omega) = [-i(omega - omega_b) + (gamma_b + Gamma)/2]^-1
    Accepts scalar or array omega.
    """
    return 1.0 / (
        -1j * (omega - spec.mode_b.omega) + (spec.mode_b.gamma + Gamma) / 2.0
    )


def chi_a(omega, spec: SystemSpec, Gamma: float):
    """Susceptibility of mode a dressed by its coupling through b.

    chi_a(omega) = [-i(omega - omega_a) + gamma_a/2 + chi_b(omega)*lambda^2]^-1
    """
    return 1.0 / (
        -1j * (omega - spec.mode_a.omega)
        + spec.mode_a.gamma / 2.0
        + chi_b(omega, spec, Gamma) * spec.coupling**2
    )


def mode_a_response(omega, spec: SystemSpec, Gamma: float):
    """Pulled frequency and dressed damping of mode a at probe frequency omega.

    Returns (omega_a_pulled, gamma_a_prime) from the real and imaginary
    parts of lambda^2 * chi_b.
    """
    lam2 = spec.coupling**2
    gtot = spec.mode_b.gamma + Gamma
    denom = (omega - spec.mode_b.omega) ** 2 + gtot**2 / 4.0
    omega_pulled = spec.mode_a.omega + lam2 * (omega - spec.mode_b.omega) / denom
    gamma_prime = spec.mode_a.gamma + lam2 * gtot / denom
    return omega_pulled, gamma_prime


def induced_damping(lam: float, gamma_b: float, Gamma: float) -> float:
    """On-resonance induced damping of mode a: Gamma_a = 4*lambda^2/(gamma_b + Gamma)."""
    if not gamma_b + Gamma > 0:
        raise ValueError("gamma_b + Gamma must be > 0")
    return 4.0 * lam**2 / (gamma_b + Gamma)


def induced_damping_detuned(
    lam: float, gamma_b: float, Gamma: float, delta: float
) -> float:
    """Induced damping of mode a when b is detuned by delta = omega_b - omega_a.

    Gamma_a(delta) = lambda^2*(gamma_b + Gamma) / (delta^2 + (gamma_b + Gamma)^2/4);
    reduces to the on-resonance value at delta = 0.
    """
    if not gamma_b + Gamma > 0:
        raise ValueError("gamma_b + Gamma must be > 0")
    gtot = gamma_b + Gamma
    return lam**2 * gtot / (delta**2 + gtot**2 / 4.0)


def cooperativity_ab(spec: SystemSpec) -> float:
    """C_ab = 4*lambda^2/(gamma_a*gamma_b)."""
    ga, gb = spec.mode_a.gamma, spec.mode_b.gamma
    if ga <= 0 or gb <= 0:
        return math.inf if spec.coupling > 0 else 0.0
    return 4.0 * spec.coupling**2 / (ga * gb)


def optomechanical_cooperativity(Gamma: float, gamma_b: float) -> float:
    """C_OM = Gamma/gamma_b."""
    if not gamma_b > 0:
        raise ValueError("gamma_b must be > 0")
    return Gamma / gamma_b


def n_eff_closed_form(
    spec: SystemSpec,
    Gamma: float,
    nbar: float,
    nbar_b: float | None = None,
) -> OccupationResult:
    """Effective occupation of mode a from the weighted bath average.

    n_eff = (gamma_a*nbar_a + Gamma_a*(gamma_b/(Gamma+gamma_b))*nbar_b)
            / (gamma_a + Gamma_a)

    ``nbar`` is the mode-a bath occupation (evaluated at omega_a); by
    default the same value is used for mode b's bath, pass ``nbar_b`` for
    distinct temperatures.  Gamma_a uses the detuning-aware Lorentzian so
    the formula degrades gracefully when omega_a != omega_b; regime
    violations are reported through the result's ``flags``, not raised.
    """
    if nbar < 0 or (nbar_b is not None and nbar_b < 0):
        raise ValueError("occupations must be >= 0")
    if nbar_b is None:
        nbar_b = nbar
    ga, gb = spec.mode_a.gamma, spec.mode_b.gamma
    delta = spec.mode_b.omega - spec.mode_a.omega
    gamma_a_ind = induced_damping_detuned(spec.coupling, gb, Gamma, delta)
    num = ga * nbar + gamma_a_ind * (gb / (gb + Gamma)) * nbar_b
    value = num / (ga + gamma_a_ind)
    return OccupationResult(value, regime_flags(spec, Gamma))


def optimal_cooperativity(C_ab: float) -> float:
    """Occupation-minimizing optomechanical cooperativity sqrt(1 + C_ab)."""
    if C_ab < 0:
        raise ValueError(f"C_ab must be >= 0, got {C_ab}")
    return math.sqrt(1.0 + C_ab)


def cooling_limit_ratio(C_ab: float) -> float:
    """Minimum achievable n_eff/nbar: 2/(1 + sqrt(1 + C_ab))."""
    if C_ab < 0:
        raise ValueError(f"C_ab must be >= 0, got {C_ab}")
    return 2.0 / (1.0 + math.sqrt(1.0 + C_ab))


def narrowed_linewidth(gamma_a: float, C_ab: float) -> float:
    """Mode-a linewidth at the cooling optimum: gamma_a*sqrt(1 + C_ab)."""
    if gamma_a < 0 or C_ab < 0:
        raise ValueError("gamma_a and C_ab must be >= 0")
    return gamma_a * math.sqrt(1.0 + C_ab)


def force_noise_psd(
    spec: SystemSpec, Gamma: float, temperature: float
) -> ForceNoiseResult:
    """Thermal force noise density on mode a in the classical limit.

    S_FF = [1 + C_ab/(1 + C_OM)^2] * m * gamma_a * kB * T; the bracketed
    factor is returned separately so dimensionless checks avoid SI
    constants.  At C_OM = 0 this is the conventional-cooling baseline
    (1 + C_ab) * m * gamma_a * kB * T.
    """
    if spec.mass_a is None or not spec.mass_a > 0:
        raise ValueError("spec.mass_a must be set and > 0 for force noise")
    if not temperature > 0:
        raise ValueError("temperature must be > 0")
    cab = cooperativity_ab(spec)
    com = optomechanical_cooperativity(Gamma, spec.mode_b.gamma)
    factor = 1.0 + cab / (1.0 + com) ** 2
    s_ff = factor * spec.mass_a * spec.mode_a.gamma * KB * temperature
    nbar = thermal_occupation(spec.mode_a.omega, temperature)
    return ForceNoiseResult(s_ff=s_ff, factor=factor, classical=nbar >= REGIME_FACTOR)


def cooling_summary(
    spec: SystemSpec, Gamma: float | None = None, nbar: float | None = None
) -> CoolingSummary:
    """Assemble every closed-form figure of merit for one operating point.

    Gamma defaults to the value implied by the system's cavity drive; nbar
    defaults to the mode-a bath occupation.
    """
    if Gamma is None:
        Gamma = optical_damping(spec.cavity.alpha_g0, spec.cavity.kappa)
    if nbar is None:
        nbar = spec.mode_a.nbar
    nbar_b = (
        None
        if spec.mode_a.bath_temperature == spec.mode_b.bath_temperature
        else spec.mode_b.nbar
    )
    n_eff = n_eff_closed_form(spec, Gamma, nbar, nbar_b=nbar_b)
    omega_pulled, gamma_prime = mode_a_response(spec.mode_a.omega, spec, Gamma)
    return CoolingSummary(
        Gamma=Gamma,
        Gamma_a=gamma_prime - spec.mode_a.gamma,
        C_ab=cooperativity_ab(spec),
        C_OM=optomechanical_cooperativity(Gamma, spec.mode_b.gamma),
        n_eff=float(n_eff),
        linewidth_a=gamma_prime,
        omega_a_pulled=omega_pulled,
        flags=n_eff.flags,
    )
