"""Sideband linearisation, gyroscopic equivalence, dissipative thresholds."""

import math

import numpy as np
import pytest

from ptstab.core import PreconditionError, char_poly, char_poly_matrix, roots
from ptstab.nls import (
    NLSParams,
    ThresholdCurve,
    ThresholdMismatchError,
    as_gyro_system,
    assemble_linearization,
    boundary_linear_slope,
    dissipative_threshold,
    ideal_spectrum,
    ideal_threshold,
    nonlinear_loss_threshold,
    threshold_polynomial,
    whitney_amplitude,
)
from ptstab.routh_hurwitz import hurwitz

BASE = NLSParams(alpha=1.0, gamma=1.0, a=0.0, c=0.0, k=1.0, sigma=1.0, u0=(0.5, 0.0))


def _sorted(vals):
    return sorted(vals, key=lambda z: (z.imag, z.real))


def _eigs(m):
    return _sorted(np.linalg.eigvals(m))


def _assert_multisets_close(got, want, tol):
    # greedy nearest matching; plain sorting is unstable when members share a
    # coordinate to within rounding
    rem = list(want)
    for z in got:
        j = min(range(len(rem)), key=lambda i: abs(rem[i] - z))
        assert abs(rem[j] - z) <= tol, (z, rem[j])
        rem.pop(j)


# --- parameters ---------------------------------------------------------------


def test_params_validation():
    with pytest.raises(PreconditionError):
        NLSParams(0.0, 1.0, 0.0, 0.0, 1.0, 1.0, (0.0, 0.0))
    with pytest.raises(PreconditionError):
        NLSParams(1.0, 1.0, -0.1, 0.0, 1.0, 1.0, (0.0, 0.0))


def test_carrier_frequency_identity():
    p = NLSParams(1.5, 0.8, 0.0, 0.0, 2.0, 1.0, (0.3, 0.4))
    assert p.norm_sq == pytest.approx(0.25, abs=1e-15)
    assert p.omega == pytest.approx(1.5 * 4.0 - 0.8 * 0.25, abs=1e-12)


# --- lossless spectrum ----------------------------------------------------------


def test_assemble_zero_amplitude_dispersion_pattern():
    p = BASE.with_amplitude(0.0)
    got = _eigs(assemble_linearization(p))
    expected = _sorted(
        [
            1j * (2.0 + 1.0),
            1j * (2.0 - 1.0),
            -1j * (2.0 - 1.0),
            -1j * (2.0 + 1.0),
        ]
    )
    for z, w in zip(got, expected):
        assert z == pytest.approx(w, abs=1e-12)


def test_assemble_quarter_amplitude_pattern():
    got = _eigs(assemble_linearization(BASE))
    inner = math.sqrt(0.5)
    expected = _sorted([1j * (2.0 + inner), 1j * (2.0 - inner), -1j * (2.0 - inner), -1j * (2.0 + inner)])
    for z, w in zip(got, expected):
        assert z == pytest.approx(w, abs=1e-9)


def test_assemble_at_threshold_krein_collision():
    p = BASE.with_amplitude(ideal_threshold(BASE))
    sp = roots(char_poly_matrix(assemble_linearization(p)))
    assert any(sp.multiplicity_flags)
    ims = sorted(z.imag for z in sp.roots)
    assert ims == pytest.approx([-2.0, -2.0, 2.0, 2.0], abs=1e-6)


def test_ideal_spectrum_against_eigensolve():
    rng = np.random.default_rng(41)
    for _ in range(300):
        alpha, gamma, sigma = rng.uniform(0.2, 2.0, size=3)
        k = rng.uniform(-2.0, 2.0)
        ui = math.sqrt(alpha) * sigma / math.sqrt(2.0 * gamma)
        u = rng.uniform(0.0, 1.5) * ui
        phase = rng.uniform(0.0, 2.0 * math.pi)
        p = NLSParams(alpha, gamma, 0.0, 0.0, k, sigma, (u * math.cos(phase), u * math.sin(phase)))
        closed = ideal_spectrum(p)
        direct = _eigs(assemble_linearization(p))
        _assert_multisets_close(closed, direct, 1e-9)


def test_ideal_spectrum_stability_split():
    below = ideal_spectrum(BASE)  # |u0| = 0.5 < 0.7071
    assert max(abs(z.real) for z in below) == 0.0
    above = ideal_spectrum(BASE.with_amplitude(math.sqrt(0.75)))
    assert max(z.real for z in above) == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert sorted(z.real for z in above)[0] == pytest.approx(-math.sqrt(0.5), abs=1e-12)


def test_ideal_threshold_values():
    assert ideal_threshold(BASE) == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-15)
    assert ideal_threshold(NLSParams(4.0, 1.0, 0.0, 0.0, 1.0, 1.0, (0.0, 0.0))) ** 2 == pytest.approx(
        4.0 * 0.5, abs=1e-15
    )
    assert ideal_threshold(NLSParams(1.0, 1.0, 0.0, 0.0, 1.0, 2.0, (0.0, 0.0))) == pytest.approx(
        math.sqrt(2.0), abs=1e-15
    )


# --- gyroscopic equivalence ------------------------------------------------------


def test_as_gyro_system_zero_amplitude_undamped():
    sys = as_gyro_system(BASE.with_amplitude(0.0))
    assert sys.D.frobenius() == 0.0
    assert sys.Omega == pytest.approx(1.0, abs=1e-15)


def test_as_gyro_damping_eigenvalues():
    sys = as_gyro_system(BASE)
    lo, hi = sys.D.sym_eigenvalues()
    assert hi == pytest.approx(0.5, abs=1e-15)
    assert lo == pytest.approx(-0.5, abs=1e-15)


def test_cross_assembly_spectra_match():
    rng = np.random.default_rng(43)
    for _ in range(1000):
        alpha, gamma, sigma = rng.uniform(0.2, 2.0, size=3)
        k = rng.uniform(-2.0, 2.0)
        ui = math.sqrt(alpha) * sigma / math.sqrt(2.0 * gamma)
        u = rng.uniform(0.0, 1.5) * ui
        phase = rng.uniform(0.0, 2.0 * math.pi)
        p = NLSParams(alpha, gamma, 0.0, 0.0, k, sigma, (u * math.cos(phase), u * math.sin(phase)))
        sq = roots(char_poly(as_gyro_system(p))).roots
        mq = roots(char_poly_matrix(assemble_linearization(p))).roots
        _assert_multisets_close(sq, mq, 1e-8)
        # damping eigenvalues are +/- 2 gamma |u0|^2 regardless of phase
        lo, hi = as_gyro_system(p).D.sym_eigenvalues()
        assert hi == pytest.approx(2.0 * gamma * u * u, rel=1e-13, abs=1e-13)
        assert lo == pytest.approx(-2.0 * gamma * u * u, rel=1e-13, abs=1e-13)


def test_lossless_spectrum_symmetric_about_both_axes():
    rng = np.random.default_rng(47)
    for _ in range(200):
        alpha, gamma, sigma = rng.uniform(0.2, 2.0, size=3)
        k = rng.uniform(-2.0, 2.0)
        u = rng.uniform(0.0, 1.5) * math.sqrt(alpha) * sigma / math.sqrt(2.0 * gamma)
        p = NLSParams(alpha, gamma, 0.0, 0.0, k, sigma, (u, 0.0))
        vals = roots(char_poly_matrix(assemble_linearization(p))).roots
        for mirror in (lambda z: -z, lambda z: z.conjugate()):
            mirrored = _sorted([mirror(z) for z in vals])
            for z, w in zip(_sorted(vals), mirrored):
                assert z == pytest.approx(w, abs=1e-8)


def test_lossless_ops_reject_losses():
    lossy = BASE.with_losses(0.1, 0.0)
    with pytest.raises(PreconditionError):
        ideal_spectrum(lossy)
    with pytest.raises(PreconditionError):
        as_gyro_system(lossy)


# --- dissipative thresholds -------------------------------------------------------


def test_threshold_collapses_to_ideal_without_dispersive_loss():
    for c in (0.25, 1.0, 3.0):
        found = dissipative_threshold(BASE, 0.0, c)
        assert len(found) == 1
        root = found[0]
        assert root.is_transition and root.stable_side == "below"
        assert abs(root.u0_norm - ideal_threshold(BASE)) <= 1e-12


def test_threshold_exists_below_ideal_with_dispersive_loss():
    found = dissipative_threshold(BASE, 0.1, 1.0)
    assert len(found) == 2
    lower, upper = found
    assert lower.u0_norm < ideal_threshold(BASE) < upper.u0_norm
    assert lower.is_transition and lower.stable_side == "above"
    assert upper.is_transition and upper.stable_side == "below"
    # oracle: Hurwitz verdict on the assembled sideband matrix across each root
    lossy = BASE.with_losses(0.1, 1.0)

    def stable(u):
        return hurwitz(char_poly_matrix(assemble_linearization(lossy.with_amplitude(u)))).stable

    assert not stable(lower.u0_norm - 1e-4) and stable(lower.u0_norm + 1e-4)
    assert stable(upper.u0_norm - 1e-4) and not stable(upper.u0_norm + 1e-4)


def test_threshold_pure_dispersive_loss_has_no_stable_phase():
    # with c = 0 the polynomial has no positive real root because the
    # linearised carrier is unstable at every amplitude
    assert dissipative_threshold(BASE, 0.1, 0.0) == ()
    lossy = BASE.with_losses(0.1, 0.0)
    for u in (0.05, 0.5, 1.0, 3.0):
        assert not hurwitz(char_poly_matrix(assemble_linearization(lossy.with_amplitude(u)))).stable


def test_threshold_requires_some_loss():
    with pytest.raises(PreconditionError):
        dissipative_threshold(BASE, 0.0, 0.0)


def test_threshold_polynomial_roots_satisfy_polynomial():
    rng = np.random.default_rng(53)
    for _ in range(200):
        a = rng.uniform(0.0, 0.3)
        c = rng.uniform(0.05, 3.0)
        found = dissipative_threshold(BASE, a, c)
        l3, l2, l1, l0 = threshold_polynomial(1.0, 1.0, 1.0, 1.0, a, c)
        for r in found:
            s = r.u0_norm**2
            monomials = (l3 * s**3, l2 * s**2, l1 * s, l0)
            assert abs(sum(monomials)) <= 1e-8 * max(1e-300, *(abs(m) for m in monomials))


def test_threshold_curve_validates_samples():
    samples = []
    for c in (0.5, 1.0, 2.0):
        lower = dissipative_threshold(BASE, 0.1, c)[0]
        samples.append((0.1, c, lower.u0_norm))
    samples.append((0.0, 1.0, ideal_threshold(BASE)))
    ThresholdCurve(1.0, 1.0, 1.0, 1.0, tuple(samples), branch=0)
    with pytest.raises(PreconditionError):
        ThresholdCurve(1.0, 1.0, 1.0, 1.0, ((0.1, 1.0, 0.9),), branch=0)
    with pytest.raises(PreconditionError):
        ThresholdCurve(1.0, 1.0, 1.0, 1.0, ((0.0, 1.0, 0.5),), branch=0)


def test_enhancement_below_ideal_threshold():
    ui = ideal_threshold(BASE)
    for c in np.linspace(0.5, 3.0, 26):
        found = dissipative_threshold(BASE, 0.1, float(c))
        transitions = [r.u0_norm for r in found if r.is_transition]
        assert transitions
        assert min(transitions) < ui


# --- loss-plane cross-sections ----------------------------------------------------


def test_linear_slopes_quarter_amplitude():
    plus, minus = boundary_linear_slope(BASE)
    assert plus == pytest.approx(4.4853, abs=1e-4)
    assert minus == pytest.approx(-12.4853, abs=1e-4)


def test_linear_slope_diverges_at_small_amplitude():
    p1 = boundary_linear_slope(BASE.with_amplitude(0.1))[0]
    p2 = boundary_linear_slope(BASE.with_amplitude(0.05))[0]
    assert p2 > p1 > 100.0


def test_linear_slope_requires_subthreshold_amplitude():
    with pytest.raises(PreconditionError):
        boundary_linear_slope(BASE.with_amplitude(ideal_threshold(BASE)))
    with pytest.raises(PreconditionError):
        boundary_linear_slope(BASE.with_amplitude(1.0))


def test_threshold_converges_to_slope_line():
    # along c = slope_plus * a the threshold amplitude returns to the level
    # used to build the slope as a -> 0
    plus, _ = boundary_linear_slope(BASE)
    errs = []
    for a in (1e-2, 1e-3):
        found = dissipative_threshold(BASE, a, plus * a)
        errs.append(min(abs(r.u0_norm - 0.5) for r in found))
    assert errs[1] < errs[0]
    assert errs[1] < 5e-3


def test_nonlinear_loss_threshold_matches_slope():
    level = 0.5
    plus, _ = boundary_linear_slope(BASE.with_amplitude(level))
    for a in (1e-3, 1e-4):
        cs = nonlinear_loss_threshold(BASE, a, level)
        assert cs
        assert min(abs(c / a - plus) for c in cs) < 0.05 * abs(plus)


def test_green_level_tangent_bounded_by_slope_fan():
    # measured as da/dc, the tangent of the ideal-amplitude cross-section at
    # the origin lies inside the fan spanned by the sub-threshold slopes
    level = ideal_threshold(BASE) - 0.05
    plus, minus = boundary_linear_slope(BASE.with_amplitude(level))
    pairs = []
    for a in np.logspace(-7, -4, 7):
        cs = nonlinear_loss_threshold(BASE, float(a), ideal_threshold(BASE))
        if cs:
            pairs.append((a, min(cs)))
    assert len(pairs) >= 5
    tangents = [a / c for a, c in pairs]
    assert all(1.0 / minus < 0.0 <= t < 1.0 / plus for t in tangents)
    # the cross-section flattens toward da/dc = 0 at the origin
    assert tangents[0] < tangents[-1]


def test_whitney_amplitude_reference_coefficient():
    # correction coefficient k^2 sigma^2 / (2 |u0|_i^3) = sqrt(2) at unit parameters
    ui = ideal_threshold(BASE)
    got = whitney_amplitude(BASE, 0.1, 1.0)
    assert got == pytest.approx(ui - math.sqrt(2.0) * 0.01, abs=1e-12)
    assert whitney_amplitude(BASE, 0.0, 1.0) == ui


def test_whitney_amplitude_never_exceeds_ideal():
    rng = np.random.default_rng(59)
    ui = ideal_threshold(BASE)
    for _ in range(200):
        c = rng.uniform(0.05, 3.0)
        a = rng.uniform(0.0, 0.2) * c
        assert whitney_amplitude(BASE, a, c) <= ui


def test_whitney_amplitude_guards():
    with pytest.raises(PreconditionError):
        whitney_amplitude(BASE, 0.1, 0.0)
    with pytest.raises(PreconditionError):
        whitney_amplitude(BASE, 0.5, 1.0)  # ratio above the default guard


def test_whitney_matches_dissipative_threshold_near_umbrella():
    # the small-ratio form tracks the near-umbrella sheet of the exact
    # threshold; agreement tightens as the ratio shrinks
    rel_errs = {}
    for a in (0.05, 0.1, 0.2):
        approx = whitney_amplitude(BASE, a, 1.0)
        exact = [r.u0_norm for r in dissipative_threshold(BASE, a, 1.0)]
        nearest = min(exact, key=lambda u: abs(u - approx))
        rel_errs[a] = abs(nearest - approx) / nearest
    assert rel_errs[0.05] < rel_errs[0.1] < rel_errs[0.2]
    assert rel_errs[0.1] <= 0.05


def test_rotation_invariance_of_threshold_inputs():
    # all outputs depend on u0 only through its norm
    for phase in (0.0, 0.7, 2.1):
        p = NLSParams(1.0, 1.0, 0.0, 0.0, 1.0, 1.0, (0.5 * math.cos(phase), 0.5 * math.sin(phase)))
        assert ideal_threshold(p) == ideal_threshold(BASE)
        got = _eigs(assemble_linearization(p))
        ref = _eigs(assemble_linearization(BASE))
        for z, w in zip(got, ref):
            assert z == pytest.approx(w, abs=1e-12)
