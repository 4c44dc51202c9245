"""Gyroscopically coupled system with indefinite damping.

z'' + (D + 2*Omega*J) z' + (K + (Omega*J)^2) z = 0 with diagonal
D = diag(delta1, delta2) and detuned diagonal stiffness
K = diag(k1, k1 + kappa).  For delta2 = -delta1 and kappa = 0 the
balanced system has a spectrum symmetric about the imaginary axis: the
eigenvalues stay on the axis until a pair merges at an exceptional point
and splits into a flutter quartet.  Detuning either the loss balance or
the stiffness unfolds the exceptional points and leaves an
asymptotic-stability window that is strictly smaller than the marginal
window of the balanced system.

The module provides the damping sweep behind those eigenvalue portraits
and a scan-plus-bisection mesh of the stability boundary in the
(kappa, X, Y) coordinates, whose self-intersection column at
kappa = 0, X = 0 is the balanced marginal interval with exceptional
points at its ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    DEFAULT_CLUSTER_TOL,
    DEFAULT_EPS,
    BoundarySample,
    Mat2,
    PreconditionError,
    RootFindingError,
    Spectrum,
    Stability,
    SystemSpec,
    char_poly,
    classify,
    multiplicity_flags,
    order_by_continuity,
    roots,
)
from .routh_hurwitz import hurwitz

SPACE = "(kappa, X, Y)"


@dataclass(frozen=True)
class GyroParams:
    """Diagonal damping, detuned diagonal stiffness, gyroscopic parameter."""

    k1: float
    kappa: float
    delta1: float
    delta2: float
    Omega: float

    @property
    def X(self) -> float:
        return self.delta1 + self.delta2

    @property
    def Y(self) -> float:
        return self.delta1 - self.delta2

    @property
    def is_balanced(self) -> bool:
        """Balanced gain/loss locus: delta2 = -delta1 and kappa = 0."""
        return self.delta2 == -self.delta1 and self.kappa == 0.0


def to_system(g: GyroParams) -> SystemSpec:
    return SystemSpec(
        D=Mat2.diag(g.delta1, g.delta2),
        K=Mat2.diag(g.k1, g.k1 + g.kappa),
        Omega=g.Omega,
    )


@dataclass(frozen=True)
class SweepRow:
    """One damping sample of an eigencurve sweep; error is set on solver failure."""

    delta1: float
    spectrum: Spectrum | None
    error: str | None = None


def eigencurve_sweep(
    template: GyroParams,
    delta1_values: Sequence[float],
    *,
    balanced: bool = False,
    eps: float = DEFAULT_EPS,
    cluster_tol: float = DEFAULT_CLUSTER_TOL,
) -> list[SweepRow]:
    """Eigenvalues and classification along a sweep of delta1.

    With balanced=True the counterpart damping is locked to
    delta2 = -delta1 at every sample; otherwise the template's delta2 is
    held fixed.  Root branches are continuity-matched between adjacent
    samples so that curves of Re/Im parts can be plotted without branch
    flips.  Solver failures produce rows flagged with the error message
    instead of aborting the sweep.
    """
    if len(delta1_values) < 1:
        raise PreconditionError("need at least one delta1 sample")
    rows: list[SweepRow] = []
    reference: tuple[complex, ...] | None = None
    for d1 in delta1_values:
        d2 = -d1 if balanced else template.delta2
        g = GyroParams(template.k1, template.kappa, d1, d2, template.Omega)
        try:
            sp = roots(char_poly(to_system(g)), eps=eps, cluster_tol=cluster_tol)
        except RootFindingError as exc:
            rows.append(SweepRow(d1, None, str(exc)))
            continue
        vals = sp.roots if reference is None else order_by_continuity(reference, sp.roots)
        reference = vals
        flags = multiplicity_flags(vals, cluster_tol)
        rows.append(SweepRow(d1, Spectrum(tuple(vals), classify(vals, eps, flags), flags)))
    return rows


def _column_predicate(k1: float, Omega: float, kappa: float, x: float, eps: float):
    """Stability predicate along Y for one (kappa, X) column.

    Hurwitz-asymptotic stability for columns with net damping; on the
    tr D = 0 locus the Hurwitz conditions are identically false, so the
    self-intersection column is detected through marginal classification
    of the spectrum instead.
    """

    def stable(y: float) -> bool:
        g = GyroParams(k1, kappa, 0.5 * (x + y), 0.5 * (x - y), Omega)
        q = char_poly(to_system(g))
        rep = hurwitz(q)
        if rep.stable:
            return True
        if abs(q.c3) <= 1e-12 * (1.0 + abs(y)):
            return roots(q, eps=eps).classification is Stability.MARGINALLY_STABLE
        return False

    return stable


def boundary_surface(
    k1: float,
    Omega: float,
    kappa_values: Sequence[float],
    x_values: Sequence[float],
    y_range: tuple[float, float],
    *,
    scan_points: int = 64,
    bisect_tol: float = 1e-8,
    eps: float = DEFAULT_EPS,
) -> list[BoundarySample]:
    """Critical imbalances Y where stability flips, column by column over (kappa, X).

    Each column is scanned coarsely over y_range and every sign change of
    the stability predicate is refined by bisection.  Columns without any
    transition contribute nothing (X < 0 columns are the usual case: net
    negative damping forbids asymptotic stability).  Samples carry the
    branch index within their column and the side on which the column is
    stable.
    """
    if len(kappa_values) == 0 or len(x_values) == 0:
        raise PreconditionError("grid must be non-empty")
    if scan_points < 2:
        raise PreconditionError("need at least two scan points per column")
    y_lo, y_hi = y_range
    if not y_lo < y_hi:
        raise PreconditionError("y_range must be increasing")
    out: list[BoundarySample] = []
    ys = [y_lo + (y_hi - y_lo) * j / (scan_points - 1) for j in range(scan_points)]
    for kappa in kappa_values:
        for x in x_values:
            stable = _column_predicate(k1, Omega, kappa, x, eps)
            states = [stable(y) for y in ys]
            branch = 0
            for j in range(len(ys) - 1):
                if states[j] == states[j + 1]:
                    continue
                lo, hi = ys[j], ys[j + 1]
                lo_state = states[j]
                while hi - lo > bisect_tol:
                    mid = 0.5 * (lo + hi)
                    if stable(mid) == lo_state:
                        lo = mid
                    else:
                        hi = mid
                y_crit = 0.5 * (lo + hi)
                out.append(
                    BoundarySample(
                        space=SPACE,
                        point=(("kappa", kappa), ("X", x), ("Y", y_crit)),
                        critical="Y",
                        branch=branch,
                        stable_side="below" if lo_state else "above",
                    )
                )
                branch += 1
    return out
