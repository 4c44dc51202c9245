"""Hurwitz sign conditions for monic quartics and closed-form damping thresholds.

A monic quartic lambda^4 + c3 lambda^3 + c2 lambda^2 + c1 lambda + c0 has
every root in the open left half-plane exactly when

    h1 = c3 > 0,
    h2 = c0 > 0,
    h3 = c3*c2 - c1 > 0,
    h4 = c1*(c3*c2 - c1) - c3^2*c0 > 0.

h4 is the flutter-critical condition: on a boundary where a simple
complex pair crosses the imaginary axis, h4 vanishes while the other
three stay positive.  h2 = c0 vanishes on divergence boundaries instead.

On top of the predicate sit two closed-form thresholds for the damping
scale delta in D = delta * Dtilde with an indefinite shape matrix Dtilde:

* ``delta_cr_squared`` is the square of the critical scale bounding the
  asymptotic-stability interval 0 < delta^2 < delta_cr^2 (valid together
  with tr Dtilde > 0).  A negative return value means the quartic is
  Hurwitz for every delta > 0, so the sign is information, not an error.
* ``delta_pt`` covers the balanced case tr Dtilde = 0, tr(K Dtilde) = 0,
  where the spectrum is symmetric about the imaginary axis.  The roots
  stay pure imaginary and simple exactly for delta^2 below
  (sqrt(sigma1) - sqrt(sigma2))^2 * (-det Dtilde), with sigma_i the
  eigenvalues of K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import Mat2, PreconditionError, Quartic


class DegenerateConfigurationError(ValueError):
    """The closed-form threshold denominator vanishes for this (Dtilde, K)."""


@dataclass(frozen=True)
class HurwitzReport:
    """The four quartic stability conditions and their combined verdict."""

    h1: float  # c3, trace condition
    h2: float  # c0, zero-frequency condition
    h3: float  # c3*c2 - c1
    h4: float  # c1*(c3*c2 - c1) - c3^2*c0, flutter-critical minor
    stable: bool


def hurwitz(q: Quartic) -> HurwitzReport:
    """Evaluate the four Hurwitz conditions for a monic quartic."""
    h1 = q.c3
    h2 = q.c0
    h3 = q.c3 * q.c2 - q.c1
    h4 = q.c1 * h3 - q.c3 * q.c3 * q.c0
    return HurwitzReport(h1, h2, h3, h4, h1 > 0.0 and h2 > 0.0 and h3 > 0.0 and h4 > 0.0)


def _sym_eigs(k: Mat2) -> tuple[float, float]:
    if not k.is_symmetric:
        raise PreconditionError("stiffness matrix K must be symmetric")
    return k.sym_eigenvalues()


def delta_cr_squared(dtilde: Mat2, k: Mat2) -> float:
    """Critical squared damping scale for D = delta * Dtilde.

    Returns

        (tr(K Dtilde) - sigma1 tr Dtilde)(tr(K Dtilde) - sigma2 tr Dtilde)
        -----------------------------------------------------------------
        -det Dtilde * tr Dtilde * (tr(K Dtilde) - tr K tr Dtilde)

    verbatim; the caller interprets the sign (negative means no finite
    threshold, i.e. stable for all delta > 0 when tr Dtilde > 0).
    """
    if not dtilde.is_symmetric:
        raise PreconditionError("damping shape matrix Dtilde must be symmetric")
    s1, s2 = _sym_eigs(k)
    tr_d = dtilde.trace()
    tr_kd = (k @ dtilde).trace()
    coupling = tr_kd - k.trace() * tr_d
    denominator = -dtilde.det() * tr_d * coupling
    if denominator == 0.0:
        parts = []
        if dtilde.det() == 0.0:
            parts.append("det Dtilde = 0")
        if tr_d == 0.0:
            parts.append("tr Dtilde = 0")
        if coupling == 0.0:
            parts.append("tr(K Dtilde) - tr K tr Dtilde = 0")
        raise DegenerateConfigurationError(
            "threshold denominator vanishes: " + ", ".join(parts or ["underflow"])
        )
    numerator = (tr_kd - s1 * tr_d) * (tr_kd - s2 * tr_d)
    return numerator / denominator


def delta_pt(dtilde: Mat2, k: Mat2) -> float:
    """Marginal-stability threshold for balanced gain/loss damping.

    Requires tr Dtilde = 0 within a scale-aware band, det Dtilde < 0, and
    a positive-semidefinite symmetric K; raises PreconditionError naming
    whichever condition fails.  The returned value is the formula
    verbatim; it bounds the marginal interval only on the fully balanced
    locus, where additionally tr(K Dtilde) = 0 and the spectrum is
    symmetric about the imaginary axis.
    """
    if not dtilde.is_symmetric:
        raise PreconditionError("damping shape matrix Dtilde must be symmetric")
    s1, s2 = _sym_eigs(k)
    tol = 1e-10 * (1.0 + k.frobenius())
    tr_d = dtilde.trace()
    if abs(tr_d) > tol:
        raise PreconditionError(f"tr Dtilde = {tr_d:g} is not zero within tolerance {tol:g}")
    det_d = dtilde.det()
    if det_d >= 0.0:
        raise PreconditionError(f"det Dtilde = {det_d:g} must be negative (indefinite damping)")
    if s1 < 0.0:
        raise PreconditionError(f"stiffness eigenvalue {s1:g} is negative, outside the formula's regime")
    return abs(math.sqrt(s1) - math.sqrt(s2)) * math.sqrt(-det_d)
