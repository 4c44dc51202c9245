"""Modulational instability of a carrier wave under dissipative perturbation.

The envelope equation is i A_t + (alpha - i a) A_xx + (gamma + i c)|A|^2 A = 0
with dispersion alpha > 0, focusing nonlinearity gamma > 0, dispersive
loss a >= 0 and nonlinear loss c >= 0.  Linearising about the plane wave
A0 exp(i k x - i omega t), omega = alpha k^2 - gamma |A0|^2, and keeping
the first sideband pair of wavenumber sigma reduces the dynamics to a
real 4x4 first-order system in the sideband quadratures (v, w):

    J v' + 2 alpha k sigma J w - alpha sigma^2 v + 2 gamma u0 u0^T v
        + 2 k a sigma w + a sigma^2 J v + 2 c (J u0) u0^T v = 0,
    J w' - 2 alpha k sigma J v - alpha sigma^2 w + 2 gamma u0 u0^T w
        - 2 k a sigma v + a sigma^2 J w + 2 c (J u0) u0^T w = 0,

with u0 the carrier quadrature vector and J the skew generator.  The
scalar coupling (u0^T v) times J u0 is the rank-one operator
(J u0) u0^T acting on v; the lossless reduction and the Hurwitz oracle
both confirm that reading.

Without losses the system maps exactly onto a gyroscopically coupled
pair with indefinite damping (eigenvalues of the damping matrix are
+/- 2 gamma |u0|^2), the spectrum is symmetric about both axes, and the
instability threshold is |u0|_i = sigma sqrt(alpha / (2 gamma)).  With
losses the threshold amplitude solves a cubic in |u0|^2 whose surface
over the (a, c) loss plane carries an umbrella singularity at
(0, 0, |u0|_i): near the axis a << c the threshold drops below |u0|_i
by (k^2 sigma^2 / (2 |u0|_i^3)) (a/c)^2, so dissipation enlarges the
unstable domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import (
    Mat2,
    PreconditionError,
    Quartic,
    SystemSpec,
    char_poly_matrix,
    cubic_roots,
    quadratic_roots,
)
from .routh_hurwitz import hurwitz

_J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


class ThresholdMismatchError(RuntimeError):
    """A threshold-polynomial root is not confirmed by the Hurwitz oracle."""


@dataclass(frozen=True)
class NLSParams:
    """Carrier and sideband parameters of the perturbed envelope equation."""

    alpha: float
    gamma: float
    a: float
    c: float
    k: float
    sigma: float
    u0: tuple[float, float]

    def __post_init__(self) -> None:
        if not (self.alpha > 0.0 and self.gamma > 0.0 and self.sigma > 0.0):
            raise PreconditionError("alpha, gamma and sigma must be positive")
        if self.a < 0.0 or self.c < 0.0:
            raise PreconditionError("loss coefficients a and c must be non-negative")
        for v in (self.alpha, self.gamma, self.a, self.c, self.k, self.sigma, *self.u0):
            if not math.isfinite(v):
                raise PreconditionError("NLS parameters must be finite")

    @property
    def norm_sq(self) -> float:
        return self.u0[0] ** 2 + self.u0[1] ** 2

    @property
    def norm(self) -> float:
        return math.hypot(self.u0[0], self.u0[1])

    @property
    def omega(self) -> float:
        """Carrier frequency alpha k^2 - gamma |u0|^2, recomputed on access."""
        return self.alpha * self.k**2 - self.gamma * self.norm_sq

    def with_amplitude(self, norm: float) -> "NLSParams":
        return NLSParams(self.alpha, self.gamma, self.a, self.c, self.k, self.sigma, (norm, 0.0))

    def with_losses(self, a: float, c: float) -> "NLSParams":
        return NLSParams(self.alpha, self.gamma, a, c, self.k, self.sigma, self.u0)


def assemble_linearization(p: NLSParams) -> np.ndarray:
    """First-order matrix M of the sideband system, state (v1, v2, w1, w2).

    Assembled by multiplying the quadrature equations through by
    J^-1 = -J.  The characteristic polynomial of M is a real quartic.
    """
    u = np.array(p.u0)
    dyad = np.outer(u, u)
    s2 = p.sigma**2
    # common diagonal block and skew coupling block
    diag_block = -p.alpha * s2 * _J2 + 2.0 * p.gamma * (_J2 @ dyad) - p.a * s2 * np.eye(2) - 2.0 * p.c * dyad
    coupling = 2.0 * p.alpha * p.k * p.sigma * np.eye(2) - 2.0 * p.k * p.a * p.sigma * _J2
    m = np.zeros((4, 4))
    m[:2, :2] = diag_block
    m[2:, 2:] = diag_block
    m[:2, 2:] = -coupling
    m[2:, :2] = coupling
    return m


def _require_lossless(p: NLSParams, op: str) -> None:
    if p.a != 0.0 or p.c != 0.0:
        raise PreconditionError(f"{op} requires a = c = 0 (lossless carrier)")


def ideal_threshold(p: NLSParams) -> float:
    """Lossless instability threshold |u0|_i = sigma * sqrt(alpha / (2 gamma))."""
    return math.sqrt(p.alpha * p.sigma**2 / (2.0 * p.gamma))


def ideal_spectrum(p: NLSParams) -> tuple[complex, complex, complex, complex]:
    """Closed-form lossless eigenvalues

        lambda = +/- 2 i alpha k sigma +/- i sigma sqrt(2 alpha gamma (|u0|_i^2 - |u0|^2)).

    Pure imaginary below the threshold amplitude; above it the inner
    pair collides and splits into a quartet with one growing member.
    """
    _require_lossless(p, "ideal_spectrum")
    carrier = 2.0 * p.alpha * p.k * p.sigma
    gap = 2.0 * p.alpha * p.gamma * (ideal_threshold(p) ** 2 - p.norm_sq)
    inner = p.sigma * np.sqrt(complex(gap))
    vals = (
        1j * (carrier + inner),
        1j * (carrier - inner),
        -1j * (carrier - inner),
        -1j * (carrier + inner),
    )
    return tuple(sorted(vals, key=lambda z: (z.imag, z.real)))  # type: ignore[return-value]


def as_gyro_system(p: NLSParams) -> SystemSpec:
    """Exact lossless equivalence with a gyroscopic indefinitely damped pair:

        Omega = alpha sigma^2 - gamma |u0|^2,
        D     = 2 gamma (u0 u0^T J - J u0 u0^T),
        K     = (4 alpha^2 k^2 sigma^2 + gamma^2 |u0|^4) I.

    D is symmetric and traceless with eigenvalues +/- 2 gamma |u0|^2
    regardless of the carrier phase, which is the balanced gain/loss
    signature of the sideband dynamics.
    """
    _require_lossless(p, "as_gyro_system")
    u1, u2 = p.u0
    d = Mat2.symmetric(
        4.0 * p.gamma * u1 * u2,
        2.0 * p.gamma * (u2 * u2 - u1 * u1),
        -4.0 * p.gamma * u1 * u2,
    )
    k_iso = 4.0 * p.alpha**2 * p.k**2 * p.sigma**2 + p.gamma**2 * p.norm_sq**2
    return SystemSpec(D=d, K=Mat2.diag(k_iso, k_iso), Omega=p.alpha * p.sigma**2 - p.gamma * p.norm_sq)


def threshold_polynomial(
    alpha: float, gamma: float, sigma: float, k: float, a: float, c: float
) -> tuple[float, float, float, float]:
    """Coefficients (L3, L2, L1, L0) of the threshold cubic in s = |u0|^2,

        L3 s^3 + L2 s^2 + L1 s + L0 = 0,

    whose positive roots are the candidate instability thresholds under
    losses (a, c).
    """
    s2 = sigma * sigma
    ca = c * a
    l3 = 2.0 * c * c * (ca - gamma * alpha)
    l2 = 4.0 * s2 * ca * (ca - gamma * alpha) - 4.0 * a * a * k * k * (gamma * gamma + c * c) + c * c * s2 * (
        a * a + alpha * alpha
    )
    l1 = 2.0 * a * s2 * (
        alpha * s2 * (alpha * c - gamma * a) + 2.0 * s2 * c * a * a + 4.0 * a * k * k * (gamma * alpha - ca)
    )
    l0 = a * a * s2 * s2 * (s2 - 4.0 * k * k) * (a * a + alpha * alpha)
    return l3, l2, l1, l0


def _real_positive_roots(coeffs: tuple[float, float, float, float]) -> list[float]:
    """Real positive roots s of L3 s^3 + L2 s^2 + L1 s + L0 with degree handling."""
    cs = list(coeffs)
    scale = max(abs(v) for v in cs)
    if scale == 0.0:
        return []
    # strip trailing zeros (roots at s = 0) and negligible leading coefficients
    while cs and abs(cs[-1]) <= 1e-15 * scale:
        cs.pop()
    while cs and abs(cs[0]) <= 1e-14 * scale:
        cs.pop(0)
    if len(cs) <= 1:
        return []
    if len(cs) == 2:
        candidates = [complex(-cs[1] / cs[0])]
    elif len(cs) == 3:
        candidates = list(quadratic_roots(cs[1] / cs[0], cs[2] / cs[0]))
    else:
        candidates = list(cubic_roots(cs[1] / cs[0], cs[2] / cs[0], cs[3] / cs[0]))
    out: list[float] = []
    for z in candidates:
        if abs(z.imag) <= 1e-8 * (1.0 + abs(z)) and z.real > 1e-14:
            s = z.real
            if all(abs(s - seen) > 1e-10 * max(1.0, s) for seen in out):
                out.append(s)
    return sorted(out)


@dataclass(frozen=True)
class ThresholdRoot:
    """One positive root of the threshold polynomial, oracle-checked."""

    u0_norm: float
    branch: int
    is_transition: bool  # Hurwitz stability actually flips across the root
    stable_side: str     # "below", "above", or "none"


def _minors(q: Quartic) -> tuple[float, float, float, float]:
    rep = hurwitz(q)
    return rep.h1, rep.h2, rep.h3, rep.h4


def dissipative_threshold(
    template: NLSParams,
    a: float,
    c: float,
    *,
    minor_probe: float = 1e-6,
    side_probe: float = 1e-4,
) -> tuple[ThresholdRoot, ...]:
    """Positive threshold amplitudes |u0| under losses (a, c), oracle-validated.

    Solves the threshold cubic in |u0|^2 and cross-checks every root
    against the Hurwitz conditions of the assembled sideband matrix: some
    condition must change sign within a relative distance minor_probe of
    the root, otherwise the polynomial transcription cannot be trusted
    and ThresholdMismatchError is raised.  Roots where the full stability
    verdict flips are flagged as transitions and carry the stable side.
    Returns an empty tuple when no positive real root exists.
    """
    if a == 0.0 and c == 0.0:
        raise PreconditionError("dissipative_threshold requires (a, c) != (0, 0)")
    base = template.with_losses(a, c)
    roots_s = _real_positive_roots(threshold_polynomial(base.alpha, base.gamma, base.sigma, base.k, a, c))
    out: list[ThresholdRoot] = []
    for idx, s in enumerate(roots_s):
        u = math.sqrt(s)

        def quartic_at(norm: float) -> Quartic:
            return char_poly_matrix(assemble_linearization(base.with_amplitude(norm)))

        h = minor_probe * max(1.0, u)
        lo_minors = _minors(quartic_at(u - h))
        hi_minors = _minors(quartic_at(u + h))
        at_minors = _minors(quartic_at(u))
        minor_scale = max(1.0, *(abs(v) for v in lo_minors), *(abs(v) for v in hi_minors))
        flips = any(lo * hi < 0.0 for lo, hi in zip(lo_minors, hi_minors))
        touches = any(abs(v) <= 1e-8 * minor_scale for v in at_minors)
        if not (flips or touches):
            raise ThresholdMismatchError(
                f"threshold root |u0|={u:.12g} at (a={a:g}, c={c:g}) is not confirmed by any "
                f"Hurwitz condition within {minor_probe:g}; check the polynomial transcription"
            )
        hs = side_probe * max(1.0, u)
        below = hurwitz(quartic_at(u - hs)).stable
        above = hurwitz(quartic_at(u + hs)).stable
        if below == above:
            side = "none"
        else:
            side = "below" if below else "above"
        out.append(ThresholdRoot(u, idx, below != above, side))
    return tuple(out)


def nonlinear_loss_threshold(template: NLSParams, a: float, u0_norm: float) -> tuple[float, ...]:
    """Positive nonlinear-loss values c on the threshold surface at fixed (a, |u0|).

    The threshold polynomial is also cubic in c; this solves that
    orientation, which is the natural one for constant-amplitude
    cross-sections of the boundary in the loss plane.
    """
    alpha, gamma, sigma, k = template.alpha, template.gamma, template.sigma, template.k
    s = u0_norm * u0_norm

    # the threshold polynomial is exactly cubic in c at fixed (a, s), so
    # four exact evaluations reconstruct its coefficients without a
    # second hand-expanded transcription
    def value(c: float) -> float:
        l3, l2, l1, l0 = threshold_polynomial(alpha, gamma, sigma, k, a, c)
        return ((l3 * s + l2) * s + l1) * s + l0

    v0, v1, v2, v3 = value(0.0), value(1.0), value(-1.0), value(2.0)
    d = v0
    b = 0.5 * (v1 + v2) - v0
    aa = (v3 + 3.0 * v0 - 3.0 * v1 - v2) / 6.0
    cc = v1 - v0 - aa - b
    return tuple(_real_positive_roots((aa, b, cc, d)))


@dataclass(frozen=True)
class ThresholdCurve:
    """Samples (a, c, |u0|_critical) of one branch of the threshold surface.

    Construction revalidates every sample against the threshold
    polynomial (residual normalised by the largest monomial) and pins the
    lossless-dispersion edge a = 0 to the ideal threshold.
    """

    alpha: float
    gamma: float
    sigma: float
    k: float
    samples: tuple[tuple[float, float, float], ...]
    branch: int

    def __post_init__(self) -> None:
        ui = math.sqrt(self.alpha * self.sigma**2 / (2.0 * self.gamma))
        for a, c, u in self.samples:
            s = u * u
            l3, l2, l1, l0 = threshold_polynomial(self.alpha, self.gamma, self.sigma, self.k, a, c)
            monomials = (l3 * s**3, l2 * s**2, l1 * s, l0)
            norm = max(1e-300, *(abs(m) for m in monomials))
            residual = abs(sum(monomials)) / norm
            if residual > 1e-8:
                raise PreconditionError(
                    f"threshold sample (a={a:g}, c={c:g}, |u0|={u:g}) violates the threshold "
                    f"polynomial: normalised residual {residual:.3e}"
                )
            if a == 0.0 and abs(u - ui) > 1e-12:
                raise PreconditionError(
                    f"sample at a = 0 must sit at the ideal threshold {ui!r}, got {u!r}"
                )


def boundary_linear_slope(p: NLSParams) -> tuple[float, float]:
    """Slopes of the two tangent lines c = slope * a of the threshold surface
    cross-section at amplitude |u0| < |u0|_i,

        slope = (sigma/|u0|^2) * [-sigma +/- k (2|u0|_i^2 - |u0|^2) / (|u0|_i sqrt(|u0|_i^2 - |u0|^2))].

    Returns (plus branch, minus branch).  Fails at and above the ideal
    threshold, where the cross-section degenerates into the umbrella
    point.
    """
    ui = ideal_threshold(p)
    gap = ui * ui - p.norm_sq
    if gap <= 0.0:
        raise PreconditionError("boundary_linear_slope requires |u0| < |u0|_i")
    if p.norm_sq == 0.0:
        raise PreconditionError("boundary_linear_slope requires |u0| > 0")
    wing = p.k * (2.0 * ui * ui - p.norm_sq) / (ui * math.sqrt(gap))
    pref = p.sigma / p.norm_sq
    return (pref * (-p.sigma + wing), pref * (-p.sigma - wing))


def whitney_amplitude(p: NLSParams, a: float, c: float, *, max_ratio: float = 0.2) -> float:
    """Small-dispersive-loss threshold amplitude in canonical umbrella form,

        |u0|_d = |u0|_i - (k^2 sigma^2 / (2 |u0|_i^3)) * (a/c)^2  <=  |u0|_i.

    Valid for a much smaller than c; the ratio guard is caller-tunable.
    """
    if c <= 0.0:
        raise PreconditionError("whitney_amplitude requires c > 0 (the umbrella axis is excluded)")
    if a < 0.0:
        raise PreconditionError("dispersive loss a must be non-negative")
    if a / c > max_ratio:
        raise PreconditionError(f"a/c = {a / c:g} exceeds the small-ratio guard {max_ratio:g}")
    ui = ideal_threshold(p)
    return ui - 0.5 * (p.k**2 * p.sigma**2 / ui**3) * (a / c) ** 2
