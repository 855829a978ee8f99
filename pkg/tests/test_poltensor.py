import numpy as np
import pytest

from conftest import problem
from polarization2d.errors import ContrastNearSpectrum, NotOrthogonal
from polarization2d.geometry import BUILTIN_DOMAINS, Ellipse, Kite
from polarization2d.oracle import oracle_ellipse_tensor
from polarization2d.pipeline import Problem
from polarization2d.poltensor import (PolTensor, pol_direct, pol_dual, pol_spectral,
                                      polarization_tensor, spectral_distance, transform_tensor)
from polarization2d.spectral import SpectralData


def rot(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def rel(a, b):
    return np.abs(np.asarray(a) - np.asarray(b)).max() / np.abs(np.asarray(b)).max()


def test_disk_direct():
    p = problem("circle", 128)
    m = pol_direct(p.db, p.K, 1.0)
    np.testing.assert_allclose(m.m, np.pi * np.eye(2), atol=1e-10)
    assert m.method == "direct" and m.is_real


def test_ellipse_direct(oracle_fixtures):
    p = problem("ellipse")
    m = pol_direct(p.db, p.K, 1.0).m
    np.testing.assert_allclose(m, np.diag([12 * np.pi / 7, 12 * np.pi / 5]), atol=1e-8)
    np.testing.assert_allclose(m, oracle_fixtures["ellipse21_tensor_phi0.0000_mu1"].expected,
                               atol=1e-8)


def test_dual_at_minus_half(oracle_fixtures):
    p = problem("ellipse")
    m = pol_dual(p.db, p.K, -0.5).m
    np.testing.assert_allclose(m, np.diag([-6 * np.pi, -3 * np.pi]), atol=1e-7)
    np.testing.assert_allclose(m, oracle_fixtures["ellipse21_tensor_phi0.0000_mu-0.5"].expected,
                               atol=1e-7)
    d = problem("circle", 128)
    np.testing.assert_allclose(pol_dual(d.db, d.K, -0.5).m, -2 * np.pi * np.eye(2), atol=1e-9)


def test_direct_refuses_minus_half():
    p = problem("ellipse")
    with pytest.raises(ContrastNearSpectrum) as exc:
        pol_direct(p.db, p.K, -0.5)
    assert exc.value.eigenvalue == pytest.approx(-0.5)
    assert polarization_tensor(p.db, p.K, -0.5).method == "dual"


def test_guard_near_pole():
    p = problem("ellipse")
    with pytest.raises(ContrastNearSpectrum):
        pol_direct(p.db, p.K, 1 / 6 + 1e-8)
    m = pol_direct(p.db, p.K, 1 / 6 + 1e-4)
    assert m.condition_warning
    assert m.distance == pytest.approx(1e-4, rel=1e-6)
    assert not pol_direct(p.db, p.K, 2.0).condition_warning


def test_kite_dual_matches_direct():
    p = problem("kite")
    assert rel(pol_dual(p.db, p.K, 2.0).m, pol_direct(p.db, p.K, 2.0).m) <= 1e-8


def test_spectral_single_atom():
    sd = SpectralData(np.array([0.0]), np.array([np.pi]), np.array([np.pi]), np.array([0.0]),
                      np.pi)
    mu = 2 + 1j
    np.testing.assert_allclose(pol_spectral(sd, mu).m, np.pi / mu * np.eye(2), atol=1e-15)


def test_spectral_ellipse_matches_direct():
    p = problem("ellipse")
    m = pol_spectral(p.spectral, 1.0).m
    np.testing.assert_allclose(m, np.diag([12 * np.pi / 7, 12 * np.pi / 5]), atol=1e-7)


@pytest.mark.parametrize("name", BUILTIN_DOMAINS)
@pytest.mark.parametrize("mu", [0.6, -0.6, 1.0, -1.0, 2.0, 5.0, 1 + 1j])
def test_method_agreement(name, mu):
    p = problem(name)
    d = p.tensor(mu, method="direct").m
    u = p.tensor(mu, method="dual").m
    s = p.tensor(mu, method="spectral").m
    assert rel(d, u) <= 1e-7
    assert rel(d, s) <= 1e-7
    assert rel(u, s) <= 1e-7


def test_keller_duality(rng):
    p = problem("kite")
    for _ in range(20):
        mu = rng.choice([-1, 1]) * rng.uniform(0.55, 10)
        m_pos = p.tensor(mu).m
        m_neg = p.tensor(-mu).m
        assert abs(m_pos[1, 1] + m_neg[0, 0]) <= 1e-8 * np.abs(m_pos).max()


def test_translation_invariance():
    base = problem("kite").tensor(1.3).m
    shifted = Problem(Kite().transformed(offset=(3.0, -7.0)), 256).tensor(1.3).m
    assert rel(shifted, base) <= 1e-9


@pytest.mark.parametrize("name", BUILTIN_DOMAINS)
def test_decay_at_infinity(name):
    p = problem(name)
    vals = [mu * np.diag(p.tensor(mu).m.real) for mu in (10.0, 100.0, 1000.0)]
    devs = [np.abs(v - p.area).max() for v in vals]
    assert devs[2] <= 1e-3 * p.area
    mm = p.tensor(1e6).m.real
    np.testing.assert_allclose(1e6 * np.diag(mm), p.area, rtol=1e-4)


def test_conjugate_symmetry():
    p = problem("star")
    mu = 0.7 + 0.4j
    np.testing.assert_allclose(p.tensor(np.conj(mu)).m, np.conj(p.tensor(mu).m), atol=1e-10)


def test_transform_tensor_examples():
    t = PolTensor(1.0, np.diag([12 * np.pi / 7, 12 * np.pi / 5]).astype(complex), "direct")
    np.testing.assert_allclose(transform_tensor(t, np.eye(2), 1.0).m, t.m)
    np.testing.assert_allclose(transform_tensor(t, rot(np.pi / 2), 1.0).m,
                               np.diag([12 * np.pi / 5, 12 * np.pi / 7]), atol=1e-14)
    with pytest.raises(NotOrthogonal):
        transform_tensor(t, [[1, 0.1], [0, 1]], 1.0)
    with pytest.raises(ValueError):
        transform_tensor(t, np.eye(2), -1.0)


def test_rotated_ellipse_similarity():
    t0 = problem("ellipse").tensor(1.0)
    t1 = Problem(Ellipse(2, 1, np.pi / 6), 256).tensor(1.0)
    assert rel(t1.m, transform_tensor(t0, rot(np.pi / 6), 1.0).m) <= 1e-8
    np.testing.assert_allclose(t1.m, oracle_ellipse_tensor(2, 1, np.pi / 6, 1.0), atol=1e-8)


def test_spectral_distance_helper():
    lam, d = spectral_distance(0.3, [0.1, 0.25])
    assert lam == 0.25 and d == pytest.approx(0.05)
    assert spectral_distance(1.0, [])[1] == np.inf


def test_unknown_method():
    p = problem("circle", 128)
    with pytest.raises(ValueError):
        polarization_tensor(p.db, p.K, 1.0, method="magic")
    with pytest.raises(ValueError):
        polarization_tensor(p.db, p.K, 1.0, method="spectral")
