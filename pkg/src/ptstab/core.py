"""Quartic spectral core for two-degree-of-freedom linear systems.

Every system treated by this package is a pair of coupled second-order
equations

    z'' + (D + 2*Omega*J) z' + (K + (Omega*J)^2) z = 0,        z in R^2,

with symmetric damping D, symmetric stiffness K, scalar gyroscopic
parameter Omega, and the fixed skew generator J = [[0, -1], [1, 0]].
Substituting z ~ exp(lambda*t) reduces every stability question to the
four roots of a monic real quartic, so this module owns exactly three
jobs: assembling that quartic, solving it reliably (including near double
roots, where closed-form solvers are at their most fragile), and
classifying the resulting root pattern.

Roots come from a depressed-quartic factorisation into two quadratics
(resolvent-cubic path) with an Ehrlich-Aberth simultaneous iteration as
fallback.  Both paths finish with Newton polishing, conjugate-pair
symmetrisation and an explicit residual gate, so callers never receive
silently wrong roots.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Sequence

import numpy as np

DEFAULT_EPS = 1e-8          # half-width of the |Re lambda| = 0 band used by classify()
DEFAULT_CLUSTER_TOL = 1e-5  # relative root distance below which roots count as coalesced
_RESIDUAL_TOL = 1e-10       # |q(root)| <= tol * max(1, |root|)^4 after polishing
_ABERTH_MAX_ITER = 100


class RootFindingError(RuntimeError):
    """Raised when the quartic solver cannot reach the residual gate."""


class PreconditionError(ValueError):
    """Raised when an operation is called outside its stated domain."""


class Stability(Enum):
    ASYMPTOTICALLY_STABLE = "asymptotically_stable"
    MARGINALLY_STABLE = "marginally_stable"
    FLUTTER = "flutter"
    DIVERGENCE = "divergence"
    DEGENERATE = "degenerate"


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise PreconditionError(f"{name} must be finite, got {v!r}")


# ---------------------------------------------------------------------------
# small dense matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mat2:
    """Real 2x2 matrix with the handful of operations the quartic assembly needs."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self) -> None:
        _require_finite("Mat2 entry", self.m11, self.m12, self.m21, self.m22)

    @classmethod
    def symmetric(cls, m11: float, m12: float, m22: float) -> "Mat2":
        """Construct with m12 == m21 guaranteed exactly."""
        return cls(m11, m12, m12, m22)

    @classmethod
    def diag(cls, d1: float, d2: float) -> "Mat2":
        return cls(d1, 0.0, 0.0, d2)

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def is_symmetric(self) -> bool:
        return self.m12 == self.m21

    def trace(self) -> float:
        return self.m11 + self.m22

    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def frobenius(self) -> float:
        return math.sqrt(self.m11**2 + self.m12**2 + self.m21**2 + self.m22**2)

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.m11 + other.m11, self.m12 + other.m12, self.m21 + other.m21, self.m22 + other.m22)

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(self.m11 - other.m11, self.m12 - other.m12, self.m21 - other.m21, self.m22 - other.m22)

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def scaled(self, s: float) -> "Mat2":
        return Mat2(s * self.m11, s * self.m12, s * self.m21, s * self.m22)

    def sym_eigenvalues(self) -> tuple[float, float]:
        """Eigenvalues of a symmetric matrix, ascending (closed form)."""
        if not self.is_symmetric:
            raise PreconditionError("sym_eigenvalues requires a symmetric matrix")
        mean = 0.5 * (self.m11 + self.m22)
        radius = math.hypot(0.5 * (self.m11 - self.m22), self.m12)
        return mean - radius, mean + radius

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=float)


#: fixed gyroscopic generator, J @ J == -I
J = Mat2(0.0, -1.0, 1.0, 0.0)


@dataclass(frozen=True)
class SystemSpec:
    """Two-degree-of-freedom system z'' + (D + 2*Omega*J) z' + (K + (Omega*J)^2) z = 0."""

    D: Mat2
    K: Mat2
    Omega: float = 0.0

    def __post_init__(self) -> None:
        if not self.D.is_symmetric:
            raise PreconditionError("damping matrix D must be symmetric")
        if not self.K.is_symmetric:
            raise PreconditionError("stiffness matrix K must be symmetric")
        _require_finite("Omega", self.Omega)

    def damping_op(self) -> Mat2:
        """Velocity-proportional operator D + 2*Omega*J."""
        return self.D + J.scaled(2.0 * self.Omega)

    def stiffness_op(self) -> Mat2:
        """Zero-frequency operator K + (Omega*J)^2 = K - Omega^2 * I."""
        w2 = self.Omega * self.Omega
        return Mat2(self.K.m11 - w2, self.K.m12, self.K.m21, self.K.m22 - w2)

    def first_order(self) -> np.ndarray:
        """Equivalent 4x4 first-order matrix in the state (z, z')."""
        b = self.damping_op().as_array()
        c = self.stiffness_op().as_array()
        top = np.hstack([np.zeros((2, 2)), np.eye(2)])
        bottom = np.hstack([-c, -b])
        return np.vstack([top, bottom])


# ---------------------------------------------------------------------------
# quartic polynomial
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Quartic:
    """Monic real quartic lambda^4 + c3*lambda^3 + c2*lambda^2 + c1*lambda + c0."""

    c0: float
    c1: float
    c2: float
    c3: float

    def __post_init__(self) -> None:
        _require_finite("Quartic coefficient", self.c0, self.c1, self.c2, self.c3)

    def __call__(self, lam: complex) -> complex:
        return (((lam + self.c3) * lam + self.c2) * lam + self.c1) * lam + self.c0

    def derivative(self, lam: complex) -> complex:
        return ((4.0 * lam + 3.0 * self.c3) * lam + 2.0 * self.c2) * lam + self.c1

    def coefficients(self) -> tuple[float, float, float, float]:
        return self.c0, self.c1, self.c2, self.c3

    def companion(self) -> np.ndarray:
        m = np.zeros((4, 4))
        m[0, 1] = m[1, 2] = m[2, 3] = 1.0
        m[3, :] = [-self.c0, -self.c1, -self.c2, -self.c3]
        return m


def char_poly(sys: SystemSpec) -> Quartic:
    """Characteristic quartic det(lambda^2 I + lambda*(D + 2*Omega*J) + K - Omega^2 I).

    For Omega = 0 the coefficients reduce to the classical identities
    c3 = tr D, c2 = tr K + det D, c1 = tr K tr D - tr(K D), c0 = det K.
    """
    b = sys.damping_op()
    c = sys.stiffness_op()
    return Quartic(
        c0=c.det(),
        c1=b.m11 * c.m22 + b.m22 * c.m11 - b.m12 * c.m21 - b.m21 * c.m12,
        c2=c.trace() + b.det(),
        c3=b.trace(),
    )


def char_poly_matrix(m: np.ndarray) -> Quartic:
    """Characteristic quartic of a real 4x4 matrix via the Faddeev-LeVerrier recursion."""
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise PreconditionError(f"expected a 4x4 matrix, got shape {m.shape}")
    eye = np.eye(4)
    mk = m.copy()
    coeffs = []
    for k in range(1, 5):
        ak = float(np.trace(mk)) / k
        coeffs.append(ak)
        if k < 4:
            mk = m @ (mk - ak * eye)
    a1, a2, a3, a4 = coeffs
    return Quartic(c0=-a4, c1=-a3, c2=-a2, c3=-a1)


# ---------------------------------------------------------------------------
# closed-form building blocks
# ---------------------------------------------------------------------------


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def quadratic_roots(b: float, c: float) -> tuple[complex, complex]:
    """Roots of the monic real quadratic x^2 + b*x + c, cancellation-safe."""
    disc = b * b - 4.0 * c
    if disc >= 0.0:
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b))
        if q == 0.0:
            return complex(-0.5 * b), complex(-0.5 * b)
        return complex(q), complex(c / q)
    sq = math.sqrt(-disc)
    return complex(-0.5 * b, 0.5 * sq), complex(-0.5 * b, -0.5 * sq)


def cubic_roots(b: float, c: float, d: float) -> tuple[complex, complex, complex]:
    """Roots of the monic real cubic x^3 + b*x^2 + c*x + d (Cardano / trigonometric)."""
    _require_finite("cubic coefficient", b, c, d)
    shift = b / 3.0
    p = c - b * b / 3.0
    q = d - b * c / 3.0 + 2.0 * b**3 / 27.0
    if p == 0.0 and q == 0.0:
        ts: tuple[complex, complex, complex] = (0j, 0j, 0j)
    else:
        disc = 0.25 * q * q + p**3 / 27.0
        if disc > 0.0:
            s = math.sqrt(disc)
            u = _cbrt(-0.5 * q + s)
            v = _cbrt(-0.5 * q - s)
            real = u + v
            half = math.sqrt(3.0) / 2.0 * (u - v)
            ts = (complex(real), complex(-0.5 * real, half), complex(-0.5 * real, -half))
        else:
            w = math.sqrt(-p / 3.0)
            arg = -0.5 * q / w**3
            theta = math.acos(min(1.0, max(-1.0, arg))) / 3.0
            ts = tuple(complex(2.0 * w * math.cos(theta - 2.0 * math.pi * k / 3.0)) for k in range(3))  # type: ignore[assignment]
    out = []
    for t in ts:
        x = t - shift
        # one Newton step against the undepresssed cubic
        f = ((x + b) * x + c) * x + d
        df = (3.0 * x + 2.0 * b) * x + c
        if df != 0:
            step = f / df
            if cmath.isfinite(step):
                x2 = x - step
                if abs(((x2 + b) * x2 + c) * x2 + d) <= abs(f):
                    x = x2
        out.append(x)
    return tuple(out)  # type: ignore[return-value]


def _quadratic_complex(b: complex, c: complex) -> tuple[complex, complex]:
    # monic quadratic with complex coefficients
    d = cmath.sqrt(b * b - 4.0 * c)
    if (b.real * d.real + b.imag * d.imag) > 0.0:
        d = -d
    q = 0.5 * (-b + d)
    if q == 0:
        return 0.5 * (-b + d), 0.5 * (-b - d)
    return q, c / q


def _sqrt_pair(z: complex) -> tuple[complex, complex]:
    s = cmath.sqrt(z)
    return s, -s


def _closed_form_quartic(q: Quartic) -> list[complex] | None:
    """Depressed-quartic factorisation; None when the resolvent path degenerates."""
    c0, c1, c2, c3 = q.coefficients()
    e = c3 / 4.0
    p = c2 - 3.0 * c3 * c3 / 8.0
    qq = c1 - c3 * c2 / 2.0 + c3**3 / 8.0
    r = c0 - c3 * c1 / 4.0 + c3 * c3 * c2 / 16.0 - 3.0 * c3**4 / 256.0
    scale = max(1.0, abs(p), abs(qq), abs(r))
    if abs(qq) <= 1e-14 * scale:
        z1, z2 = quadratic_roots(p, r)
        ys = [*_sqrt_pair(z1), *_sqrt_pair(z2)]
    else:
        candidates = cubic_roots(p, 0.25 * p * p - r, -0.125 * qq * qq)
        m = None
        for t in candidates:
            if abs(t.imag) <= 1e-8 * (1.0 + abs(t)) and (m is None or t.real > m):
                m = t.real
        if m is None or m <= 0.0:
            return None
        s = math.sqrt(2.0 * m)
        t0 = 0.5 * p + m
        shift = qq / (2.0 * s)
        ya = _quadratic_complex(complex(-s), complex(t0 + shift))
        yb = _quadratic_complex(complex(s), complex(t0 - shift))
        ys = [*ya, *yb]
    return [y - e for y in ys]


def _polish(q: Quartic, z: complex, steps: int = 2) -> complex:
    for _ in range(steps):
        f = q(z)
        if f == 0:
            break
        df = q.derivative(z)
        if df == 0:
            break
        step = f / df
        if not cmath.isfinite(step):
            break
        z2 = z - step
        if abs(q(z2)) > abs(f):
            break
        z = z2
    return z


def _aberth(q: Quartic) -> list[complex]:
    radius = 1.0 + max(abs(c) for c in q.coefficients())
    zs = [radius * cmath.exp(1j * (2.0 * math.pi * k / 4.0 + 0.7)) for k in range(4)]
    for _ in range(_ABERTH_MAX_ITER):
        converged = True
        nxt = []
        for i, z in enumerate(zs):
            f = q(z)
            if f == 0:
                nxt.append(z)
                continue
            df = q.derivative(z)
            w = f / df if df != 0 else f
            ssum = 0j
            for jj, other in enumerate(zs):
                if jj == i:
                    continue
                dz = z - other
                if dz == 0:
                    dz = 1e-12 * (1.0 + abs(z))
                ssum += 1.0 / dz
            denom = 1.0 - w * ssum
            delta = w / denom if denom != 0 else w
            if not cmath.isfinite(delta):
                delta = w
            nxt.append(z - delta)
            if abs(delta) > 1e-14 * (1.0 + abs(z)):
                converged = False
        zs = nxt
        if converged:
            return zs
    raise RootFindingError("quartic iteration did not converge within the iteration cap")


def _conjugate_symmetrize(vals: Sequence[complex]) -> list[complex]:
    """Pair roots of a real polynomial into exact conjugate pairs (or exact reals)."""
    rem = sorted(vals, key=lambda z: -abs(z.imag))
    out: list[complex] = []
    while rem:
        z = rem.pop(0)
        if abs(z.imag) <= 1e-10 * (1.0 + abs(z)) or not rem:
            out.append(complex(z.real, 0.0))
            continue
        target = z.conjugate()
        j = min(range(len(rem)), key=lambda i: abs(rem[i] - target))
        w = rem.pop(j)
        avg = 0.5 * (z + w.conjugate())
        out.extend((avg, avg.conjugate()))
    return out


def _residuals_ok(q: Quartic, vals: Sequence[complex]) -> bool:
    return all(abs(q(z)) <= _RESIDUAL_TOL * max(1.0, abs(z)) ** 4 for z in vals)


def multiplicity_flags(vals: Sequence[complex], cluster_tol: float = DEFAULT_CLUSTER_TOL) -> tuple[bool, ...]:
    """Flag every root that has another root within the relative cluster tolerance."""
    flags = [False] * len(vals)
    for i in range(len(vals)):
        for jj in range(i + 1, len(vals)):
            if abs(vals[i] - vals[jj]) <= cluster_tol * max(1.0, abs(vals[i]), abs(vals[jj])):
                flags[i] = flags[jj] = True
    return tuple(flags)


def classify(
    vals: Sequence[complex],
    eps: float = DEFAULT_EPS,
    flags: Sequence[bool] | None = None,
) -> Stability:
    """Classify a root multiset against the band |Re lambda| <= eps.

    Asymptotic stability needs every root strictly left of the band;
    marginal stability needs every root inside the band and simple.  A
    banded spectrum with a multiplicity cluster is degenerate (exceptional
    point candidate), as is the mixed decaying-plus-marginal boundary
    case.  Unstable spectra split into flutter (an oscillatory growing
    pair) and divergence (a growing real root).
    """
    if eps <= 0.0:
        raise PreconditionError("classification tolerance eps must be positive")
    if flags is None:
        flags = multiplicity_flags(vals)
    if all(z.real < -eps for z in vals):
        return Stability.ASYMPTOTICALLY_STABLE
    if all(abs(z.real) <= eps for z in vals):
        return Stability.DEGENERATE if any(flags) else Stability.MARGINALLY_STABLE
    unstable = [z for z in vals if z.real > eps]
    if unstable:
        if any(abs(z.imag) > eps * (1.0 + abs(z)) for z in unstable):
            return Stability.FLUTTER
        return Stability.DIVERGENCE
    # no growing root, but some decay while others sit on the band: boundary case
    return Stability.DEGENERATE


@dataclass(frozen=True)
class Spectrum:
    """Four quartic roots with a stability verdict and coalescence flags."""

    roots: tuple[complex, complex, complex, complex]
    classification: Stability
    multiplicity_flags: tuple[bool, bool, bool, bool]

    def max_growth_rate(self) -> float:
        return max(z.real for z in self.roots)


def roots(q: Quartic, *, eps: float = DEFAULT_EPS, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> Spectrum:
    """Solve a monic real quartic and classify the result.

    Closed-form factorisation first, Ehrlich-Aberth on residual failure,
    Newton polishing and conjugate symmetrisation on both paths.  Raises
    RootFindingError instead of returning roots that miss the residual
    gate |q(root)| <= 1e-10 * max(1, |root|)^4.
    """
    vals = _closed_form_quartic(q)
    if vals is not None:
        vals = _conjugate_symmetrize([_polish(q, z) for z in vals])
    if vals is None or not _residuals_ok(q, vals):
        vals = _conjugate_symmetrize([_polish(q, z) for z in _aberth(q)])
        if not _residuals_ok(q, vals):
            worst = max(abs(q(z)) for z in vals)
            raise RootFindingError(f"quartic roots failed the residual gate (worst residual {worst:.3e})")
    vals.sort(key=lambda z: (z.imag, z.real))
    flags = multiplicity_flags(vals, cluster_tol)
    return Spectrum(tuple(vals), classify(vals, eps, flags), flags)


def system_spectrum(sys: SystemSpec, *, eps: float = DEFAULT_EPS, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> Spectrum:
    return roots(char_poly(sys), eps=eps, cluster_tol=cluster_tol)


def order_by_continuity(reference: Sequence[complex], vals: Sequence[complex]) -> tuple[complex, ...]:
    """Reorder vals to track reference branches (minimal total displacement).

    Ties are broken toward the permutation that keeps the sign pattern of
    the imaginary parts, which stops conjugate partners from swapping
    between adjacent sweep samples.
    """
    n = len(reference)
    best: tuple[complex, ...] | None = None
    best_cost = math.inf
    for perm in permutations(range(n)):
        cost = sum(abs(vals[p] - reference[i]) for i, p in enumerate(perm))
        mismatch = sum(
            1
            for i, p in enumerate(perm)
            if (reference[i].imag > 0.0) != (vals[p].imag > 0.0) and abs(vals[p].imag) > 1e-12
        )
        cost += 1e-12 * mismatch
        if cost < best_cost:
            best_cost = cost
            best = tuple(vals[p] for p in perm)
    assert best is not None
    return best


@dataclass(frozen=True)
class BoundarySample:
    """One point on a stability boundary in a named three-parameter space."""

    space: str
    point: tuple[tuple[str, float], ...]
    critical: str
    branch: int
    stable_side: str

    def coord(self, name: str) -> float:
        for key, value in self.point:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def value(self) -> float:
        return self.coord(self.critical)
