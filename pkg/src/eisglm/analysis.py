"""Truncation-error vectors, error-inhibiting residuals, and linear stability.

The central objects are the Taylor coefficient vectors of the one-step
defect of a method ``V^{n+1} = D V^n + dt*A F(V^n) + dt*R F(V^{n+1})``:

    tau_0 = (I - D) 1
    tau_j = ((1/j) D (c-1)^j + A (c-1)^(j-1) + R c^(j-1) - (1/j) c^j) / (j-1)!

with powers taken componentwise and the convention ``0**0 = 1`` (so that
``c**(j-1)`` at ``j = 1`` is the ones vector).  A method of design order p has
tau_j = 0 for j <= p; the error-inhibiting-plus (EIS+) structure additionally
demands D tau_{p+1} = 0, D tau_{p+2} = 0 and D (A+R) tau_{p+1} = 0, which pins
the leading global error term to the tau_{p+1} direction and makes it
removable by the final-time filter (see :mod:`eisglm.postproc`).

Linear stability is analysed through the amplification matrix
``M(z) = (I - z R)^{-1} (D + z A)`` of the scalar test problem y' = lambda*y,
``z = lambda*dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .linalg import SingularMatrixError, eigenvalues, lu_solve, spectral_radius

if TYPE_CHECKING:  # pragma: no cover
    from .tableau import MethodTableau

__all__ = [
    "TruncationSeries",
    "EisResiduals",
    "StabilityScan",
    "AStabilityReport",
    "truncation_vectors",
    "scaled_leading_tau",
    "eis_residuals",
    "amplification_matrix",
    "imaginary_axis_interval",
    "a_stability_probe",
    "stability_scan",
    "zero_stability_check",
]


@dataclass(frozen=True)
class TruncationSeries:
    """Vectors tau_0 ... tau_jmax of a tableau, each of length s."""

    jmax: int
    tau: tuple[np.ndarray, ...]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.tau[j]


@dataclass(frozen=True)
class EisResiduals:
    """Order and EIS+ condition residuals (all max-abs norms)."""

    r_order: float  # max_{j<=p} ||tau_j||
    r1: float       # ||D tau_{p+1}||
    r2: float       # ||D tau_{p+2}||
    r3: float       # ||D (A+R) tau_{p+1}||


@dataclass(frozen=True)
class StabilityScan:
    """Spectral radius of M(z) on a rectangular grid in the complex plane."""

    re: np.ndarray              # nx real parts
    im: np.ndarray              # ny imaginary parts
    rho: np.ndarray             # (ny, nx), +inf where I - zR is singular
    contour_at_one: np.ndarray = field(repr=False)  # boolean mask rho <= 1

    def __post_init__(self):
        if np.any(self.rho < 0):
            raise ValueError("spectral radii must be nonnegative")


@dataclass(frozen=True)
class AStabilityReport:
    """Result of sampling rho(M(z)) over the closed left half-plane."""

    max_rho: float
    worst_z: complex
    samples: int


def truncation_vectors(t: "MethodTableau", jmax: int) -> TruncationSeries:
    """Compute tau_0 ... tau_jmax for a tableau.

    Factorials are accumulated as doubles, exact for the jmax <= ~12 used
    here.
    """
    if jmax < 0:
        raise ValueError("jmax must be nonnegative")
    c = t.c
    one = np.ones(t.s)
    cm1 = c - one
    taus = [one - t.D @ one]
    fact = 1.0  # (j-1)! as a running double
    for j in range(1, jmax + 1):
        if j >= 2:
            fact *= j - 1
        v = (
            (t.D @ cm1**j) / j
            + t.A @ cm1 ** (j - 1)
            + t.R @ c ** (j - 1)
            - c**j / j
        ) / fact
        taus.append(v)
    return TruncationSeries(jmax=jmax, tau=tuple(taus))


def scaled_leading_tau(t: "MethodTableau", series: TruncationSeries | None = None) -> np.ndarray:
    """tau_{p+1} scaled by p!, the normalization used for published vectors."""
    p = t.p_design
    if series is None or series.jmax < p + 1:
        series = truncation_vectors(t, p + 1)
    return math.factorial(p) * series[p + 1]


def eis_residuals(t: "MethodTableau", series: TruncationSeries | None = None) -> EisResiduals:
    """Order-condition and EIS+ residuals of a tableau."""
    p = t.p_design
    if series is None or series.jmax < p + 2:
        series = truncation_vectors(t, p + 2)
    sup = lambda v: float(np.max(np.abs(v)))
    return EisResiduals(
        r_order=max(sup(series[j]) for j in range(p + 1)),
        r1=sup(t.D @ series[p + 1]),
        r2=sup(t.D @ series[p + 2]),
        r3=sup(t.D @ ((t.A + t.R) @ series[p + 1])),
    )


def amplification_matrix(t: "MethodTableau", z: complex) -> np.ndarray:
    """M(z) = (I - zR)^{-1} (D + zA); M(0) is exactly D.

    Raises :class:`~eisglm.linalg.SingularMatrixError` at the isolated z
    where I - zR is singular (possible only for implicit tableaus).
    """
    if z == 0:
        return t.D.astype(np.complex128)
    eye = np.eye(t.s)
    return lu_solve(eye - z * t.R, t.D.astype(np.complex128) + z * t.A)


def _rho(t: "MethodTableau", z: complex) -> float:
    try:
        return spectral_radius(amplification_matrix(t, z))
    except SingularMatrixError:
        return np.inf


# Stability-to-one threshold.  Coefficients printed to 15 digits can push a
# tangential rho = 1 contact above one by ~1e-7 without opening a genuine
# instability window, so the comparison tolerance must sit above that noise
# floor while staying far below the growth at a true boundary crossing.
RHO_ONE_TOL = 1e-6


def imaginary_axis_interval(
    t: "MethodTableau",
    tol: float = 1e-6,
    coarse_step: float = 1e-3,
    y_cap: float = 16.0,
    rho_tol: float = RHO_ONE_TOL,
) -> float:
    """Half-width y_max of the imaginary-axis stability interval (-y_max, y_max).

    Coarse scan with step ``coarse_step`` locates the first y where
    rho(M(iy)) > 1 + rho_tol, then bisection refines the crossing to ``tol``.
    Returns 0.0 when already unstable at the first sample and ``y_cap`` when
    no exceedance is found below it.  The coarse scan is a heuristic: an
    instability sliver thinner than ``coarse_step`` would be missed.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo = 0.0
    for k in range(1, int(y_cap / coarse_step) + 1):
        y = k * coarse_step
        if _rho(t, 1j * y) > 1.0 + rho_tol:
            hi = y
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _rho(t, 1j * mid) > 1.0 + rho_tol:
                    hi = mid
                else:
                    lo = mid
            return lo
        lo = y
    return y_cap


def a_stability_probe(t: "MethodTableau", samples: int = 10_000) -> AStabilityReport:
    """Sample rho(M(z)) over the closed left half-plane.

    The grid is log-radial (radii 1e-3 ... 1e6, angles spanning
    [pi/2, 3*pi/2]) plus the imaginary axis at the same radii.  This is a
    sampling certificate, not a proof.
    """
    nr = max(int(round(math.sqrt(samples))), 2)
    na = max(samples // nr, 2)
    radii = np.logspace(-3.0, 6.0, nr)
    angles = np.linspace(0.5 * np.pi, 1.5 * np.pi, na)
    worst = (0.0, 0j)
    count = 0
    for r in radii:
        for z in np.concatenate((r * np.exp(1j * angles), (1j * r, -1j * r))):
            rho = _rho(t, z)
            count += 1
            if rho > worst[0]:
                worst = (rho, complex(z))
    return AStabilityReport(max_rho=worst[0], worst_z=worst[1], samples=count)


def stability_scan(
    t: "MethodTableau",
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    nx: int,
    ny: int,
) -> StabilityScan:
    """rho(M(z)) on an nx-by-ny rectangle; singular nodes get rho = +inf."""
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be at least 2")
    if not (np.isfinite(re_range).all() and np.isfinite(im_range).all()):
        raise ValueError("scan ranges must be finite")
    re = np.linspace(re_range[0], re_range[1], nx)
    im = np.linspace(im_range[0], im_range[1], ny)
    rho = np.empty((ny, nx))
    for iy, y in enumerate(im):
        for ix, x in enumerate(re):
            rho[iy, ix] = _rho(t, complex(x, y))
    return StabilityScan(re=re, im=im, rho=rho, contour_at_one=rho <= 1.0)


def zero_stability_check(t: "MethodTableau") -> tuple[bool, np.ndarray]:
    """Zero-stability: rho(D) <= 1 + 1e-12 with a simple eigenvalue at 1."""
    lam = eigenvalues(t.D)
    rho_ok = np.max(np.abs(lam)) <= 1.0 + 1e-12
    n_at_one = int(np.sum(np.abs(lam - 1.0) <= 1e-10))
    return bool(rho_ok and n_at_one == 1), lam
