"""Core quartic machinery against independent linear-algebra oracles."""

import math

import numpy as np
import pytest

from ptstab.core import (
    J,
    Mat2,
    PreconditionError,
    Quartic,
    Spectrum,
    Stability,
    SystemSpec,
    char_poly,
    char_poly_matrix,
    classify,
    multiplicity_flags,
    order_by_continuity,
    roots,
    system_spectrum,
)


def _sorted(vals):
    return sorted(vals, key=lambda z: (z.imag, z.real))


def test_gyro_generator_entries():
    assert (J.m11, J.m22) == (0.0, 0.0)
    assert J.m21 == 1.0 and J.m12 == -1.0
    jj = J @ J
    assert (jj.m11, jj.m12, jj.m21, jj.m22) == (-1.0, 0.0, 0.0, -1.0)


def test_mat2_symmetric_constructor_exact():
    m = Mat2.symmetric(1.3, 0.7, -2.1)
    assert m.m12 == m.m21
    assert m.is_symmetric


def test_mat2_rejects_non_finite():
    with pytest.raises(PreconditionError):
        Mat2(1.0, float("nan"), 0.0, 1.0)
    with pytest.raises(PreconditionError):
        Quartic(1.0, float("inf"), 0.0, 0.0)


def test_system_spec_requires_symmetry():
    with pytest.raises(PreconditionError):
        SystemSpec(D=Mat2(0.0, 1.0, 0.0, 0.0), K=Mat2.identity())


def test_first_order_trace_is_minus_trace_d():
    rng = np.random.default_rng(7)
    for _ in range(50):
        d = Mat2.symmetric(*rng.uniform(-3, 3, size=3))
        k = Mat2.symmetric(*rng.uniform(-3, 3, size=3))
        omega = rng.uniform(-2, 2)
        sys = SystemSpec(d, k, omega)
        assert np.trace(sys.first_order()) == pytest.approx(-d.trace(), abs=1e-12)


# --- char_poly -------------------------------------------------------------


def test_char_poly_undamped_unit_stiffness():
    q = char_poly(SystemSpec(Mat2.diag(0.0, 0.0), Mat2.identity()))
    assert q.coefficients() == (1.0, 0.0, 2.0, 0.0)


def test_char_poly_balanced_case_kills_odd_coefficients():
    # tr D = 0 and tr(K D) = 0 wipe the odd-degree coefficients
    q = char_poly(SystemSpec(Mat2.diag(-0.3, 0.3), Mat2.symmetric(1.0, 0.4, 1.0)))
    assert q.c3 == 0.0
    assert q.c1 == 0.0


def test_char_poly_against_determinant_evaluation():
    # oracle: evaluate det(lambda^2 I + lambda B + C) directly at sample points
    sys = SystemSpec(Mat2.diag(0.1, 0.2), Mat2.symmetric(1.2, 0.4, 1.0), Omega=0.3)
    q = char_poly(sys)
    b = sys.damping_op().as_array()
    c = sys.stiffness_op().as_array()
    for lam in (0.3 + 0.7j, -1.1 + 0.2j, 2.0, -0.5j, 1.0 + 1.0j):
        direct = np.linalg.det(lam * lam * np.eye(2) + lam * b + c)
        assert q(lam) == pytest.approx(direct, abs=1e-12 * max(1.0, abs(lam)) ** 4)


def test_char_poly_omega_zero_identities():
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = Mat2.symmetric(*rng.uniform(-3, 3, size=3))
        k = Mat2.symmetric(*rng.uniform(-3, 3, size=3))
        q = char_poly(SystemSpec(d, k))
        kd = k @ d
        assert q.c3 == pytest.approx(d.trace(), abs=1e-12)
        assert q.c2 == pytest.approx(k.trace() + d.det(), rel=1e-12, abs=1e-12)
        assert q.c1 == pytest.approx(k.trace() * d.trace() - kd.trace(), rel=1e-9, abs=1e-9)
        assert q.c0 == pytest.approx(k.det(), rel=1e-12, abs=1e-12)


def test_quartic_invariants_with_gyroscopic_term():
    rng = np.random.default_rng(13)
    for _ in range(100):
        sys = SystemSpec(
            Mat2.symmetric(*rng.uniform(-3, 3, size=3)),
            Mat2.symmetric(*rng.uniform(-3, 3, size=3)),
            rng.uniform(-2, 2),
        )
        q = char_poly(sys)
        assert q.c3 == sys.D.trace()
        assert q.c0 == pytest.approx(np.linalg.det(sys.stiffness_op().as_array()), rel=1e-12, abs=1e-12)


# --- roots -----------------------------------------------------------------


def test_roots_double_imaginary_pair():
    sp = roots(Quartic(1.0, 0.0, 2.0, 0.0))
    assert _sorted(sp.roots) == [-1j, -1j, 1j, 1j]
    assert all(sp.multiplicity_flags)


def test_roots_balanced_undamped():
    # undamped coupled stiffness: eigenvalues +/- i sqrt(0.6), +/- i sqrt(1.4)
    q = char_poly(SystemSpec(Mat2.diag(0.0, 0.0), Mat2.symmetric(1.0, 0.4, 1.0)))
    sp = roots(q)
    expected = [-math.sqrt(1.4), -math.sqrt(0.6), math.sqrt(0.6), math.sqrt(1.4)]
    for z, im in zip(sp.roots, expected):
        assert z.real == 0.0
        assert z.imag == pytest.approx(im, abs=1e-12)


def test_roots_balanced_damped_all_imaginary():
    # below the balanced threshold the spectrum stays on the imaginary axis;
    # oracle: eigensolve of the companion matrix
    q = char_poly(SystemSpec(Mat2.diag(0.3, -0.3), Mat2.symmetric(1.0, 0.4, 1.0)))
    sp = roots(q)
    assert max(abs(z.real) for z in sp.roots) <= 1e-9
    oracle = _sorted(np.linalg.eigvals(q.companion()))
    for z, w in zip(sp.roots, oracle):
        assert z == pytest.approx(w, abs=1e-9)
    assert sp.classification is Stability.MARGINALLY_STABLE


def test_roots_residual_gate_and_conjugacy_random():
    rng = np.random.default_rng(17)
    for _ in range(2000):
        q = Quartic(*rng.uniform(-3, 3, size=4))
        sp = roots(q)
        for z in sp.roots:
            assert abs(q(z)) <= 1e-10 * max(1.0, abs(z)) ** 4
        ordered = _sorted(sp.roots)
        conjugated = _sorted([z.conjugate() for z in sp.roots])
        for z, w in zip(ordered, conjugated):
            assert z == pytest.approx(w, abs=1e-9)


def test_roots_sum_and_product_identities():
    rng = np.random.default_rng(19)
    for _ in range(500):
        q = Quartic(*rng.uniform(-3, 3, size=4))
        sp = roots(q)
        total = sum(sp.roots)
        prod = 1.0 + 0.0j
        for z in sp.roots:
            prod *= z
        assert total == pytest.approx(-q.c3, abs=1e-8)
        assert prod == pytest.approx(q.c0, abs=1e-8)


def test_roots_agree_with_first_order_eigensolve():
    rng = np.random.default_rng(23)
    for _ in range(2000):
        sys = SystemSpec(
            Mat2.symmetric(*rng.uniform(-3, 3, size=3)),
            Mat2.symmetric(*rng.uniform(-3, 3, size=3)),
            rng.uniform(-3, 3),
        )
        sp = system_spectrum(sys)
        oracle = _sorted(np.linalg.eigvals(sys.first_order()))
        for z, w in zip(sp.roots, oracle):
            assert z == pytest.approx(w, abs=1e-8)


def test_hamiltonian_symmetry_on_balanced_locus():
    # tr D = 0 and tr(K D) = 0 force spectra closed under lambda -> -conj(lambda)
    rng = np.random.default_rng(29)
    for _ in range(300):
        delta = rng.uniform(0.0, 2.0)
        k = Mat2.symmetric(rng.uniform(0.2, 3.0), rng.uniform(-1.0, 1.0), 0.0)
        k = Mat2.symmetric(k.m11, k.m12, k.m11)  # equal diagonal keeps tr(K D) = 0
        sp = system_spectrum(SystemSpec(Mat2.diag(delta, -delta), k))
        mirrored = _sorted([-z.conjugate() for z in sp.roots])
        for z, w in zip(_sorted(sp.roots), mirrored):
            assert z == pytest.approx(w, abs=1e-8)


def test_roots_rejects_nan():
    with pytest.raises(PreconditionError):
        Quartic(float("nan"), 0.0, 0.0, 0.0)


# --- classify ---------------------------------------------------------------


def test_classify_plain_cases():
    assert classify([-0.1 + 1j, -0.1 - 1j, -0.2 + 2j, -0.2 - 2j]) is Stability.ASYMPTOTICALLY_STABLE
    assert classify([0.77j, -0.77j, 1.18j, -1.18j]) is Stability.MARGINALLY_STABLE


def test_classify_flutter_in_broken_band():
    # balanced system past the threshold: one growing oscillatory pair
    q = char_poly(SystemSpec(Mat2.diag(0.3, -0.3), Mat2.symmetric(1.0, 0.4, 1.0)))
    sp = roots(char_poly(SystemSpec(Mat2.diag(0.6, -0.6), Mat2.symmetric(1.0, 0.4, 1.0))))
    assert sp.classification is Stability.FLUTTER
    assert any(z.real > 1e-8 and abs(z.imag) > 1e-8 for z in sp.roots)


def test_classify_degenerate_on_multiplicity():
    sp = roots(Quartic(1.0, 0.0, 2.0, 0.0))
    assert sp.classification is Stability.DEGENERATE


def test_classify_requires_positive_eps():
    with pytest.raises(PreconditionError):
        classify([1j, -1j, 2j, -2j], eps=0.0)


def test_multiplicity_flags_cluster_tolerance():
    flags = multiplicity_flags([1.0 + 0j, 1.0 + 5e-6j, -1.0 + 0j, 2.0 + 0j])
    assert flags == (True, True, False, False)


def test_order_by_continuity_tracks_branches():
    prev = (1.0 + 1.0j, 1.0 - 1.0j, -1.0 + 2.0j, -1.0 - 2.0j)
    shuffled = (-1.02 - 2.01j, 1.01 + 0.99j, -0.98 + 2.02j, 0.99 - 1.01j)
    ordered = order_by_continuity(prev, shuffled)
    for z, w in zip(prev, ordered):
        assert abs(z - w) < 0.05


def test_char_poly_matrix_matches_numpy():
    rng = np.random.default_rng(31)
    for _ in range(200):
        m = rng.uniform(-2, 2, size=(4, 4))
        q = char_poly_matrix(m)
        # oracle: numpy characteristic polynomial coefficients
        cs = np.poly(m)
        assert q.c3 == pytest.approx(cs[1], rel=1e-10, abs=1e-10)
        assert q.c2 == pytest.approx(cs[2], rel=1e-10, abs=1e-10)
        assert q.c1 == pytest.approx(cs[3], rel=1e-9, abs=1e-9)
        assert q.c0 == pytest.approx(cs[4], rel=1e-9, abs=1e-9)
