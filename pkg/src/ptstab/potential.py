"""Non-gyroscopic system with diagonal indefinite damping and coupled stiffness.

The system is z'' + D z' + K z = 0 with D = diag(delta1, delta2) and
K = [[k1, kappa], [kappa, k2]].  All geometry lives in the coordinates
X = delta1 + delta2 (net damping) and Y = delta1 - delta2 (gain/loss
imbalance).  On the line k1 = k2, X = 0 the system has balanced gain and
loss; its spectrum is symmetric about the imaginary axis and stays pure
imaginary for |Y| inside an interval whose ends are exceptional points,
where two imaginary eigenvalues merge into a Jordan block before
splitting into a flutter quartet.

For X > 0 the asymptotic-stability boundary is the zero set of the
flutter-critical Hurwitz condition, which is exactly quadratic in k1 at
fixed (X, Y, k2, kappa).  To first order in X that boundary is a right
conoid ruled by lines orthogonal to the Y axis; rescaling brings it to
the canonical degree-1 conoid with one self-intersection segment ending
in two umbrella singularities.  The self-intersection segment is the
balanced marginal interval, and the mismatch between it and the X -> 0+
limit of the asymptotic-stability threshold is a finite jump: the limit
along a ray X = s*(k1 - k2) depends on s and sits strictly inside the
marginal interval (the destabilization paradox).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_EPS,
    BoundarySample,
    Mat2,
    PreconditionError,
    SystemSpec,
    char_poly,
)
from .routh_hurwitz import hurwitz

SPACE = "(k1, X, Y)"


class ExtrapolationError(RuntimeError):
    """Ray-limit sequence failed the monotone-contraction check."""


@dataclass(frozen=True)
class PotentialParams:
    """Stiffness entries plus damping trace X and imbalance Y."""

    k1: float
    k2: float
    kappa: float
    X: float
    Y: float

    @property
    def delta1(self) -> float:
        return 0.5 * (self.X + self.Y)

    @property
    def delta2(self) -> float:
        return 0.5 * (self.X - self.Y)

    @classmethod
    def from_deltas(cls, k1: float, k2: float, kappa: float, delta1: float, delta2: float) -> "PotentialParams":
        return cls(k1, k2, kappa, delta1 + delta2, delta1 - delta2)


@dataclass(frozen=True)
class EPPair:
    """Imbalance values of the two exceptional points bounding the marginal interval."""

    Y_minus: float
    Y_plus: float
    double_eigenvalue_at_minus: complex


def to_system(p: PotentialParams) -> SystemSpec:
    return SystemSpec(
        D=Mat2.diag(p.delta1, p.delta2),
        K=Mat2.symmetric(p.k1, p.kappa, p.k2),
        Omega=0.0,
    )


def hamiltonian_form(delta: float, k: float, kappa: float) -> np.ndarray:
    """Complex 4x4 generator H of the balanced system in the coordinates
    x = (z1 + i z2, conj, d/dt of both), where i dx/dt = H x.

    H commutes with combined parity and complex conjugation,
    P H* = H P for P = diag(1, -1, -1, 1), entrywise exactly.  Its
    eigenvalues are i*lambda for lambda the quadratic-pencil eigenvalues
    of the underlying second-order system.
    """
    return np.array(
        [
            [0.0, 0.0, 1j, 0.0],
            [0.0, 0.0, 0.0, 1j],
            [-1j * k, kappa, 0.0, 1j * delta],
            [-kappa, -1j * k, 1j * delta, 0.0],
        ],
        dtype=complex,
    )


def ep_interval(k2: float, kappa: float) -> EPPair:
    """Exceptional-point imbalances Y = 2*(sqrt(k2+kappa) +/- sqrt(k2-kappa)).

    The balanced system (k1 = k2, X = 0) is marginally stable for
    |Y| < Y_minus, in flutter for Y_minus < |Y| < Y_plus, and has an
    all-real (divergent) spectrum beyond Y_plus.  At Y = +/-Y_minus the
    colliding pair sits at +/- i (sigma1*sigma2)^(1/4).
    """
    if kappa < 0.0:
        raise PreconditionError("kappa must be non-negative")
    sigma1 = k2 - kappa
    sigma2 = k2 + kappa
    if sigma1 <= 0.0:
        raise PreconditionError("k2 - kappa <= 0: the system diverges already at zero damping")
    r1 = math.sqrt(sigma1)
    r2 = math.sqrt(sigma2)
    return EPPair(
        Y_minus=2.0 * (r2 - r1),
        Y_plus=2.0 * (r2 + r1),
        double_eigenvalue_at_minus=1j * (sigma1 * sigma2) ** 0.25,
    )


def _h4(k1: float, k2: float, kappa: float, X: float, Y: float) -> float:
    return hurwitz(char_poly(to_system(PotentialParams(k1, k2, kappa, X, Y)))).h4


def boundary_k1(
    X: float,
    Y: float,
    k2: float,
    kappa: float,
    *,
    probe: float = 1e-4,
) -> tuple[BoundarySample, ...]:
    """Critical stiffness values k1 where asymptotic stability is lost at fixed (X, Y).

    The flutter-critical Hurwitz condition is exactly quadratic in k1, so
    its coefficients are reconstructed from three exact evaluations, the
    roots are Newton-polished against the exact condition, and each root
    is kept only if one side of it is genuinely Hurwitz-stable (zeros
    with no stable side are spurious).  Returns up to two samples sorted
    by k1; an empty tuple means no boundary crossing at this (X, Y).
    """
    if X <= 0.0:
        raise PreconditionError("boundary_k1 requires X > 0 (net damping)")
    h_m1 = _h4(k2 - 1.0, k2, kappa, X, Y)
    h_0 = _h4(k2, k2, kappa, X, Y)
    h_p1 = _h4(k2 + 1.0, k2, kappa, X, Y)
    a = 0.5 * (h_p1 + h_m1) - h_0
    b = 0.5 * (h_p1 - h_m1)
    c = h_0
    scale = max(abs(a), abs(b), abs(c), 1e-300)
    ts: list[float]
    if abs(a) <= 1e-13 * scale:
        if abs(b) <= 1e-13 * scale:
            return ()
        ts = [-c / b]
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return ()
        sq = math.sqrt(disc)
        qq = -0.5 * (b + math.copysign(sq, b))
        if qq == 0.0:
            ts = [0.0]
        else:
            ts = sorted({qq / a, c / qq})
    samples = []
    for t in sorted(ts):
        # one Newton step against the exact condition (the fit is exact up to rounding)
        slope = 2.0 * a * t + b
        if slope != 0.0:
            t = t - _h4(k2 + t, k2, kappa, X, Y) / slope
        k1c = k2 + t
        below = hurwitz(char_poly(to_system(PotentialParams(k1c - probe, k2, kappa, X, Y)))).stable
        above = hurwitz(char_poly(to_system(PotentialParams(k1c + probe, k2, kappa, X, Y)))).stable
        if not (below or above):
            continue
        side = "both" if (below and above) else ("below" if below else "above")
        samples.append(
            BoundarySample(
                space=SPACE,
                point=(("k1", k1c), ("X", X), ("Y", Y)),
                critical="k1",
                branch=len(samples),
                stable_side=side,
            )
        )
    return tuple(samples)


def conoid_linear(X: float, Y: float, k2: float, kappa: float, branch: int) -> float:
    """First-order-in-X approximation of the critical stiffness,

        k1 = k2 + (X / 4Y) * [Y^2 +/- sqrt((Y^2 - Y_minus^2)(Y^2 - Y_plus^2))],

    the ruled-surface (right conoid) form of the stability boundary.
    branch is +1 or -1 and picks the sign.  Fails on the conoid axis
    Y = 0 and inside the flutter band, where the radicand is negative and
    no real sheet exists.
    """
    if branch not in (1, -1):
        raise PreconditionError("branch must be +1 or -1")
    if Y == 0.0:
        raise PreconditionError("Y = 0 is the conoid axis; the linear form is undefined there")
    ep = ep_interval(k2, kappa)
    radicand = (Y * Y - ep.Y_minus**2) * (Y * Y - ep.Y_plus**2)
    if radicand < 0.0:
        raise PreconditionError("inside the flutter band: the linear boundary sheet is not real")
    return k2 + 0.25 * (X / Y) * (Y * Y + branch * math.sqrt(radicand))


def plucker_canonical(k2: float, kappa: float, rho: float, phi: float) -> tuple[float, float, float]:
    """Canonical degree-1 right-conoid parametrisation of the boundary germ,

        (rho, phi) -> (k2 + rho cos(phi), rho sin(phi)/sqrt(k2), 2 kappa sin(phi)/sqrt(k2)).

    The third coordinate is the ruling height in Y; its range
    [-2 kappa/sqrt(k2), 2 kappa/sqrt(k2)] is the self-intersection
    segment, which matches the marginal interval to leading order in
    kappa.
    """
    if rho < 0.0:
        raise PreconditionError("rho must be non-negative")
    if k2 <= 0.0:
        raise PreconditionError("k2 must be positive")
    rk = math.sqrt(k2)
    s = math.sin(phi)
    return (k2 + rho * math.cos(phi), rho * s / rk, 2.0 * kappa * s / rk)


@dataclass(frozen=True)
class RayLimit:
    """Extrapolated onset-of-instability imbalance along a ray into (k2, 0)."""

    value: float
    error_estimate: float
    samples: tuple[float, ...]


def _critical_imbalance(
    k1: float,
    X: float,
    k2: float,
    kappa: float,
    sign: int,
    y_max: float,
    scan_points: int,
    bisect_tol: float,
) -> float:
    def stable(y: float) -> bool:
        return hurwitz(char_poly(to_system(PotentialParams(k1, k2, kappa, X, y)))).stable

    if not stable(0.0):
        raise ExtrapolationError(
            f"no asymptotic stability at Y=0 for k1={k1:g}, X={X:g}; the ray scan has no bracket"
        )
    ys = [sign * y_max * (j + 1) / scan_points for j in range(scan_points)]
    lo = 0.0
    hi = None
    for y in ys:
        if stable(y):
            lo = y
        else:
            hi = y
            break
    if hi is None:
        raise ExtrapolationError(f"no instability found up to |Y|={y_max:g} for k1={k1:g}, X={X:g}")
    while abs(hi - lo) > bisect_tol:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ray_limit(
    slope: float,
    side: int,
    k2: float,
    kappa: float,
    *,
    rho0: float = 0.1,
    levels: int = 13,
    tail: int = 4,
    scan_points: int = 64,
    bisect_tol: float = 1e-12,
) -> RayLimit:
    """Limit of the instability-onset imbalance along the ray X = slope*(k1 - k2).

    At each ray parameter rho_n = rho0 * 2^-n the critical |Y| is located
    by scan plus bisection on the Hurwitz predicate; the geometric
    sequence is then extrapolated to rho = 0 with one Richardson step on
    the trailing samples.  The limit is strictly inside the marginal
    interval and varies with the slope, which is the finite-jump content
    of the destabilization paradox.
    """
    if side not in (1, -1):
        raise PreconditionError("side must be +1 or -1")
    if slope <= 0.0:
        raise PreconditionError("slope must be positive so that X > 0 along the ray")
    if levels < tail + 1 or tail < 3:
        raise PreconditionError("need at least tail+1 levels and tail >= 3 for extrapolation")
    y_max = ep_interval(k2, kappa).Y_plus + 1.0
    samples = []
    for n in range(levels):
        rho = rho0 * 2.0**-n
        samples.append(
            _critical_imbalance(k2 + rho, slope * rho, k2, kappa, side, y_max, scan_points, bisect_tol)
        )
    window = samples[-tail:]
    diffs = [window[i + 1] - window[i] for i in range(tail - 1)]
    if all(abs(d) <= 5.0 * bisect_tol for d in diffs):
        return RayLimit(samples[-1], 10.0 * bisect_tol, tuple(samples))
    for i in range(len(diffs) - 1):
        same_direction = diffs[i] * diffs[i + 1] >= 0.0
        contracting = abs(diffs[i + 1]) <= 1.05 * abs(diffs[i]) + 5.0 * bisect_tol
        if not (same_direction and contracting):
            raise ExtrapolationError(
                f"onset sequence is not monotonically contracting near rho=0: samples={samples}"
            )
    ratio = diffs[-1] / diffs[-2]
    if not abs(ratio) < 0.95:
        raise ExtrapolationError(f"onset sequence contracts too slowly (ratio {ratio:g}): samples={samples}")
    value = window[-1] + diffs[-1] * ratio / (1.0 - ratio)
    prev_ratio = diffs[-2] / diffs[-3] if abs(diffs[-3]) > 0.0 else ratio
    prev = window[-2] + diffs[-2] * prev_ratio / (1.0 - prev_ratio) if abs(prev_ratio) < 1.0 else value
    return RayLimit(value, abs(value - prev) + bisect_tol, tuple(samples))
