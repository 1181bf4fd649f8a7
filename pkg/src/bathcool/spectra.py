"""Exact frequency-domain solution of a linear Langevin DriftModel.

Builds adaptive frequency grids around every resonance of the drift
matrix, inverts (-i*omega*I - A) in batch, propagates the thermal input
correlators into position fluctuation spectra S_xx(omega), integrates
occupations, fits Lorentzian lines, and evaluates the fluctuating-force
density seen by a selected mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import find_peaks

from .constants import HBAR
from .errors import (
    CoverageError,
    FitFailureError,
    NumericsError,
    UnstableSystemError,
)
from .model import (
    DriftModel,
    SystemSpec,
    effective_temperature,
    stability_eigenvalues,
)

__all__ = [
    "FrequencyGrid",
    "SpectrumResult",
    "LorentzFit",
    "ForceSpectrumResult",
    "make_grid",
    "susceptibility_matrix",
    "position_spectrum",
    "integrate_occupation",
    "fit_lorentzian",
    "force_spectrum_numeric",
]

RESIDUAL_TOL = 1e-10
DEFAULT_SPAN = 50.0            # linewidths covered on each side of a resonance
DEFAULT_POINTS_PER_LW = 20.0   # dense sampling within +-5 linewidths
DEFAULT_LOG_POINTS = 160       # log-spaced fill per side from 5 to `span` linewidths


@dataclass(frozen=True)
class FrequencyGrid:
    """Sorted angular-frequency grid with its densification anchors.

    ``clusters`` records (center, linewidth) pairs for every resonance the
    grid was built around.
    """

    points: np.ndarray
    clusters: tuple

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 4:
            raise ValueError("grid needs at least 4 points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")

    def halved(self) -> "FrequencyGrid":
        """Every other point (endpoints kept); used for refinement checks."""
        idx = np.arange(0, self.points.size, 2)
        if idx[-1] != self.points.size - 1:
            idx = np.append(idx, self.points.size - 1)
        return FrequencyGrid(points=self.points[idx], clusters=self.clusters)


@dataclass(frozen=True)
class LorentzFit:
    center: float
    fwhm: float
    area: float


@dataclass(frozen=True)
class SpectrumResult:
    """Position fluctuation spectrum of one mode plus derived quantities."""

    grid: FrequencyGrid
    values: np.ndarray
    n_eff: float
    n_eff_error: float
    T_eff: float
    select: str
    fit: LorentzFit | None = None


@dataclass(frozen=True)
class ForceSpectrumResult:
    """Fluctuating-force density on the selected mode.

    ``factor`` is s_ff normalized to the bare-oscillator value
    (hbar*m*omega_a/2) * gamma_a * (2*nbar_a + 1), so it reproduces the
    closed-form bracket 1 + C_ab/(1 + C_OM)^2 in the narrowband limit.
    """

    grid: FrequencyGrid
    s_ff: np.ndarray
    factor: np.ndarray


def _require_stable(model: DriftModel):
    eigs = stability_eigenvalues(model)
    bad = eigs[eigs.real >= 0]
    if bad.size:
        raise UnstableSystemError(
            "drift matrix has non-negative-real-part eigenvalue(s): "
            + ", ".join(f"{z:.6g}" for z in bad)
        )
    return eigs


def make_grid(
    model: DriftModel,
    span_linewidths: float = DEFAULT_SPAN,
    points_per_linewidth: float = DEFAULT_POINTS_PER_LW,
    log_points: int = DEFAULT_LOG_POINTS,
) -> FrequencyGrid:
    """Adaptive grid covering every resonance of the drift matrix.

    Each eigenvalue contributes a cluster at its resonance frequency:
    linear sampling (``points_per_linewidth`` per linewidth) within +-5
    linewidths, log-spaced fill out to ``span_linewidths``.  For RWA
    models the mirrored (negative-frequency) clusters are added as well,
    since the spectrum formula samples the response at -omega.
    """
    if span_linewidths < 5:
        raise ValueError("span_linewidths must be >= 5")
    eigs = _require_stable(model)
    clusters = []
    for eig in eigs:
        center = -eig.imag
        width = -2.0 * eig.real
        clusters.append((center, width))
        if model.kind == "rwa":
            clusters.append((-center, width))

    # every cluster's log fill runs out to the global grid extent, so a
    # narrow line's power-law tail is never left to another cluster's
    # coarse sampling
    lo = min(c - span_linewidths * w for c, w in clusters)
    hi = max(c + span_linewidths * w for c, w in clusters)
    pieces = []
    n_dense = int(round(10 * points_per_linewidth)) + 1
    for center, width in clusters:
        dense = np.linspace(center - 5 * width, center + 5 * width, n_dense)
        right = max(hi - center, span_linewidths * width)
        left = max(center - lo, span_linewidths * width)
        tail_r = np.geomspace(5 * width, right, log_points + 1)[1:]
        tail_l = np.geomspace(5 * width, left, log_points + 1)[1:]
        pieces.extend([dense, center + tail_r, center - tail_l])
    points = np.unique(np.concatenate(pieces))
    return FrequencyGrid(points=points, clusters=tuple(clusters))


def _chi_batch(model: DriftModel, omegas: np.ndarray) -> np.ndarray:
    """(-i*omega*I - A)^-1 for every omega, with residual guarantee."""
    a = model.drift
    d = model.dimension
    eye = np.eye(d, dtype=complex)
    t = -1j * omegas[:, None, None] * eye - a
    try:
        chi = np.linalg.inv(t)
    except np.linalg.LinAlgError as exc:
        eigs = np.linalg.eigvals(a)
        worst = min(
            (min(abs(-1j * w - eigs)), w) for w in np.atleast_1d(omegas)
        )
        raise NumericsError(
            f"singular susceptibility near omega={worst[1]:.6g} rad/s "
            f"(drift eigenvalue within {worst[0]:.3g} of the pole)"
        ) from exc

    resid = t @ chi - eye
    scale = np.linalg.norm(t, axis=(1, 2)) * np.linalg.norm(chi, axis=(1, 2))
    rel = np.linalg.norm(resid, axis=(1, 2)) / scale
    bad = rel > RESIDUAL_TOL
    if np.any(bad):
        # one Newton refinement step: X <- X (2I - T X)
        chi[bad] = chi[bad] @ (2 * eye - t[bad] @ chi[bad])
        resid = t[bad] @ chi[bad] - eye
        rel_bad = np.linalg.norm(resid, axis=(1, 2)) / scale[bad]
        if np.any(rel_bad > RESIDUAL_TOL):
            i = int(np.argmax(rel_bad))
            raise NumericsError(
                "susceptibility residual "
                f"{rel_bad[i]:.3g} exceeds {RESIDUAL_TOL} at "
                f"omega={omegas[np.flatnonzero(bad)[i]]:.6g} rad/s"
            )
    return chi


def susceptibility_matrix(
    model: DriftModel, omega: float, allow_unstable: bool = False
) -> np.ndarray:
    """Dense susceptibility (-i*omega*I - A)^-1 at a single frequency.

    Refuses unstable models unless ``allow_unstable`` (diagnostic use).
    """
    if not allow_unstable:
        _require_stable(model)
    return _chi_batch(model, np.atleast_1d(float(omega)))[0]


def _quadrature_rows(model: DriftModel, select: str, chi: np.ndarray) -> np.ndarray:
    """Transfer from input channels to the selected quadrature, (n, nchan)."""
    b = model.noise_input
    i = model.index(select)
    if model.kind == "full":
        row = chi[:, i, :] + chi[:, model.index(select + "_dag"), :]
    else:
        row = chi[:, i, :]
    return row @ b


def _spectrum_values(model: DriftModel, select: str, points: np.ndarray) -> np.ndarray:
    corr_plus, corr_minus = model.input_correlations
    chi = _chi_batch(model, points)
    w_plus = _quadrature_rows(model, select, chi)
    values = np.abs(w_plus) ** 2 @ corr_plus
    if model.kind == "rwa":
        chi_m = _chi_batch(model, -points)
        w_minus = _quadrature_rows(model, select, chi_m)
        values = values + np.abs(w_minus) ** 2 @ corr_minus
    return values


def position_spectrum(
    model: DriftModel, select: str, grid: FrequencyGrid | None = None
) -> SpectrumResult:
    """Position fluctuation spectrum S_xx(omega) for x = a + a_dag.

    Propagates the thermal input correlators through the susceptibility
    matrix.  The RWA (annihilation-basis) model uses the asymmetric
    nbar+1 / nbar correlators with the mirrored resonance added
    explicitly; the full model carries both conjugate channels and covers
    both +-omega resonances by construction.
    """
    _require_stable(model)
    if select not in model.labels:
        raise ValueError(f"unknown mode label {select!r}; have {model.labels}")
    if grid is None:
        grid = make_grid(model)
    values = _spectrum_values(model, select, grid.points)

    vmax = float(values.max())
    neg = values < 0
    if np.any(values < -1e-12 * vmax):
        raise NumericsError("spectrum has negative values beyond roundoff level")
    n_neg = int(np.count_nonzero(neg))
    if n_neg > 1e-4 * values.size:
        raise NumericsError(
            f"{n_neg} of {values.size} spectral points negative before clipping"
        )
    values = np.where(neg, 0.0, values)

    n_eff, err = integrate_occupation(grid, values)
    if n_eff < 0:
        if n_eff < -1e-3:
            raise NumericsError(f"integrated occupation {n_eff:.4g} < 0")
        n_eff = 0.0
    omega_sel = -model.drift[model.index(select), model.index(select)].imag
    t_eff = effective_temperature(n_eff, abs(omega_sel))
    return SpectrumResult(
        grid=grid,
        values=values,
        n_eff=n_eff,
        n_eff_error=err,
        T_eff=t_eff,
        select=select,
    )


def _edge_tail(points: np.ndarray, values: np.ndarray, right: bool) -> float:
    """Estimate the integral beyond one grid edge assuming 1/omega^2 decay."""
    k = min(8, points.size - 2)
    if right:
        w1, w2 = points[-1 - k], points[-1]
        s1, s2 = values[-1 - k], values[-1]
    else:
        w1, w2 = points[k], points[0]
        s1, s2 = values[k], values[0]
    if s2 <= 0:
        return 0.0
    if s1 <= s2:
        # not decaying at the edge; fall back to a crude rectangle bound
        return float(s2 * abs(w2 - w1))
    r = math.sqrt(s1 / s2)
    x0 = (r * w1 - w2) / (r - 1.0)
    d = abs(w2 - x0)
    return float(s2 * d)


def integrate_occupation(
    grid: FrequencyGrid | np.ndarray,
    values: np.ndarray,
    omega_center: float | None = None,
) -> tuple:
    """Occupation from the integrated spectrum: (1/2pi) int S dw / 2 - 1/2.

    Trapezoidal quadrature on the adaptive grid with an analytic
    Lorentzian-tail correction beyond the grid edges.  Returns
    ``(n_eff, relative_error_estimate)``; raises CoverageError when the
    raw tail estimate exceeds 1% of the integral.
    """
    points = grid.points if isinstance(grid, FrequencyGrid) else np.asarray(grid)
    values = np.asarray(values, dtype=float)
    if points.shape != values.shape:
        raise ValueError("grid and values must have matching shapes")

    raw = float(np.trapezoid(values, points))
    idx = np.arange(0, points.size, 2)
    if idx[-1] != points.size - 1:
        idx = np.append(idx, points.size - 1)
    coarse = float(np.trapezoid(values[idx], points[idx]))
    err_quad = abs(raw - coarse) / 3.0

    tail = _edge_tail(points, values, right=False) + _edge_tail(
        points, values, right=True
    )
    ref = max(abs(raw), 1e-300)
    if tail > 0.01 * ref:
        where = f" around omega={omega_center:.6g}" if omega_center else ""
        raise CoverageError(
            f"spectrum tails{where} carry {tail / ref:.2%} of the integral; "
            "widen the grid span (>= 50 linewidths per resonance required)"
        )
    total = raw + tail
    n_eff = total / (2.0 * math.pi) / 2.0 - 0.5
    rel_err = (err_quad + 0.05 * tail) / max(abs(total), 1e-300)
    return n_eff, rel_err


def _lorentz(params, omega):
    center, fwhm, amp, base = params
    hw = fwhm / 2.0
    return amp * hw**2 / ((omega - center) ** 2 + hw**2) + base


def fit_lorentzian(
    grid: FrequencyGrid | np.ndarray, values: np.ndarray, window: tuple
) -> LorentzFit:
    """Nonlinear least-squares Lorentzian fit inside ``window = (lo, hi)``.

    The window must contain exactly one local maximum; initialization uses
    the peak location and half-maximum crossings.  Fails when no peak is
    present, several peaks overlap, or the residual exceeds 5% of the
    peak.
    """
    points = grid.points if isinstance(grid, FrequencyGrid) else np.asarray(grid)
    lo, hi = window
    mask = (points >= lo) & (points <= hi)
    x = points[mask]
    y = np.asarray(values, dtype=float)[mask]
    if x.size < 8:
        raise FitFailureError("window contains fewer than 8 grid points")

    span = float(y.max() - y.min())
    if span <= 0:
        raise FitFailureError("no peak in window (flat spectrum)")
    peaks, _ = find_peaks(y, prominence=0.05 * span)
    if peaks.size == 0:
        raise FitFailureError("no interior peak in window")
    if peaks.size > 1:
        raise FitFailureError(f"{peaks.size} peaks in window; need exactly one")

    ipk = int(peaks[0])
    base0 = float(y.min())
    amp0 = float(y[ipk] - base0)
    half = base0 + amp0 / 2.0
    left = np.flatnonzero(y[:ipk] < half)
    right = np.flatnonzero(y[ipk:] < half)
    if left.size and right.size:
        w0 = x[ipk + right[0]] - x[left[-1]]
    else:
        w0 = (x[-1] - x[0]) / 4.0
    x0 = np.array([x[ipk], w0, amp0, base0])

    res = least_squares(
        lambda p: _lorentz(p, x) - y,
        x0,
        xtol=1e-9,
        ftol=1e-15,
        gtol=None,
        x_scale="jac",
        max_nfev=2000,
    )
    center, fwhm, amp, base = res.x
    fwhm = abs(fwhm)
    resid = np.max(np.abs(_lorentz(res.x, x) - y))
    if resid > 0.05 * (amp + abs(base)):
        raise FitFailureError(
            f"fit residual {resid:.3g} exceeds 5% of peak {amp:.3g}"
        )
    return LorentzFit(center=float(center), fwhm=float(fwhm), area=float(amp * math.pi * fwhm / 2.0))


def force_spectrum_numeric(
    model: DriftModel, spec: SystemSpec, grid: FrequencyGrid | None = None
) -> ForceSpectrumResult:
    """Fluctuating-force density on mode a from the exact susceptibility.

    The per-channel force coefficients are extracted by deconvolving the
    exact mode-a response with its own a_in transfer (which enters the
    Langevin equation unfiltered with amplitude sqrt(gamma_a)); each
    channel then contributes with the symmetrized weight 2*nbar + 1.  At
    omega = omega_a the narrowband closed form is recovered.
    """
    if spec.mass_a is None:
        raise ValueError("spec.mass_a must be set for force noise")
    ga = spec.mode_a.gamma
    if not ga > 0:
        raise ValueError("gamma_a must be > 0 to normalize the force transfer")
    _require_stable(model)
    if grid is None:
        grid = make_grid(model)

    ia = model.index("a")
    chi = _chi_batch(model, grid.points)
    resp = chi[:, ia, :] @ model.noise_input
    chi_eff = resp[:, ia] / math.sqrt(ga)
    f = resp / chi_eff[:, None]  # f[:, a_in] = sqrt(gamma_a) exactly
    weights = model.input_correlations.sum(axis=0)  # 2*nbar + 1 per channel
    prefactor = HBAR * spec.mass_a * spec.mode_a.omega / 2.0
    s_ff = prefactor * (np.abs(f) ** 2 @ weights)
    baseline = prefactor * ga * weights[ia]
    return ForceSpectrumResult(grid=grid, s_ff=s_ff, factor=s_ff / baseline)
