import numpy as np
import pytest

from conftest import problem
from polarization2d.errors import InsufficientSamples
from polarization2d.geometry import Ellipse
from polarization2d.pipeline import Problem
from polarization2d.poltensor import pol_spectral
from polarization2d.rational import (RationalModel, TwoPoleCertificate, detect_two_pole,
                                     fit_rational, two_pole_tensor)
from polarization2d.shape import EllipseParams, ellipse_distance, recover_ellipse
from polarization2d.spectral import SpectralData

ELLIPSE_MUS = [-5, -2, -1, -0.6, 0.6, 1, 2, 5]
KITE_MUS = np.r_[-np.geomspace(0.5, 10, 7), np.geomspace(0.5, 10, 7)]


def samples(p, mus):
    return [(mu, p.tensor(mu).m) for mu in mus]


def check_model_invariants(model):
    R = model.residues
    assert np.all(np.abs(model.poles) < 0.5)
    assert R[:, 0, 0].min() >= -1e-8 and R[:, 1, 1].min() >= -1e-8
    s11, s22 = R[:, 0, 0].sum(), R[:, 1, 1].sum()
    assert abs(s11 - s22) <= 1e-6 * abs(s11)
    np.testing.assert_array_equal(R[:, 0, 1], R[:, 1, 0])


def test_disk_fit():
    model = fit_rational(samples(problem("circle", 128), [0.6, 1, 2, 5]), 1)
    assert model.n_poles == 1
    assert abs(model.poles[0]) < 1e-9
    np.testing.assert_allclose(model.residues[0], np.pi * np.eye(2), atol=1e-9)
    assert model.fit_residual < 1e-10
    check_model_invariants(model)
    cert = detect_two_pole(model, 1e-6)
    assert cert.lam == 0 and cert.angle_undefined
    assert cert.r_plus_sq == pytest.approx(np.pi, rel=1e-9) and cert.r_minus_sq == 0


def test_rotated_ellipse_fit_and_certificate():
    p = Problem(Ellipse(2, 1, np.pi / 4), 256)
    model = fit_rational(samples(p, ELLIPSE_MUS), 2)
    np.testing.assert_allclose(model.poles, [-1 / 6, 1 / 6], atol=1e-9)
    check_model_invariants(model)
    lo, hi = np.argsort(model.poles)
    np.testing.assert_allclose(np.abs(model.residues), np.pi, atol=1e-8)
    # off-diagonal residues carry opposite signs at the two poles
    assert model.residues[lo, 0, 1] * model.residues[hi, 0, 1] < 0
    cert = detect_two_pole(model, 1e-6)
    assert cert is not None
    assert cert.lam == pytest.approx(1 / 6, abs=1e-9)
    assert cert.r_plus_sq == pytest.approx(np.pi, rel=1e-8)
    assert cert.r_minus_sq == pytest.approx(np.pi, rel=1e-8)
    assert cert.constraint_defect <= 1e-6


def test_kite_residual_monotone_and_not_two_pole():
    kite = samples(problem("kite"), KITE_MUS)
    res = []
    for k in range(1, 7):
        model = fit_rational(kite, k)
        check_model_invariants(model)
        res.append(model.fit_residual)
        assert detect_two_pole(model, 1e-6) is None
    assert all(b <= a + 1e-12 for a, b in zip(res, res[1:]))
    assert res[-1] < 1e-3 * res[0]


def test_sample_requirements():
    s = samples(problem("circle", 128), [0.6, 1, 2, 5])
    with pytest.raises(InsufficientSamples):
        fit_rational(s, 2)
    with pytest.raises(InsufficientSamples):
        fit_rational(s[:3] + [s[0]], 1)
    with pytest.raises(ValueError):
        fit_rational(s[:3] + [(0.3, s[0][1])], 1)
    with pytest.raises(ValueError):
        fit_rational(s, 0)


def test_spectral_round_trip():
    sd = SpectralData(np.array([-0.2, -0.05, 0.05, 0.2]), np.array([1.0, 0.5, 0.3, 0.2]),
                      np.array([0.2, 0.3, 0.5, 1.0]), np.array([0.1, -0.05, 0.05, -0.1]), 2.0)
    mus = np.r_[-np.geomspace(0.6, 8, 6), np.geomspace(0.6, 8, 6)]
    model = fit_rational([(mu, pol_spectral(sd, mu).m) for mu in mus], len(sd))
    np.testing.assert_allclose(model.poles, sd.lam, atol=1e-7)
    np.testing.assert_allclose(model.residues[:, 0, 0], sd.alpha, atol=1e-7)
    np.testing.assert_allclose(model.residues[:, 1, 1], sd.beta, atol=1e-7)
    np.testing.assert_allclose(model.residues[:, 0, 1], sd.gamma, atol=1e-7)


def test_certificate_soundness_sweep():
    rng = np.random.default_rng(7)
    mus = [-5, -2, -1, -0.6, 0.6, 1, 2, 5]
    for _ in range(100):
        lam = rng.uniform(0.01, 0.45)
        rp2, rm2 = rng.uniform(0.1, 5, 2)
        frame = rng.uniform(0, np.pi)
        data = [(mu, two_pole_tensor(mu, lam, rp2, rm2, frame)) for mu in mus]
        cert = detect_two_pole(fit_rational(data, 2), 1e-6)
        assert cert is not None
        assert abs(cert.lam - lam) < 1e-7
        assert cert.r_plus_sq + cert.r_minus_sq == pytest.approx(rp2 + rm2, abs=1e-7)
        # parameters are identified up to the frame symmetry: compare the curves
        e_true = recover_ellipse(TwoPoleCertificate(lam, rp2, rm2, 0.0, frame))
        e_fit = recover_ellipse(cert)
        assert ellipse_distance(e_fit, e_true) < 1e-7


def test_certificate_completeness_proxy():
    p = problem("ellipse")
    mus = [-5, -3, -2, -1, -0.6, 0.6, 1, 2, 3, 5]
    extra = 0.01 * p.area
    data = [(mu, p.tensor(mu).m + extra * np.eye(2) / (mu - 0.3)) for mu in mus]
    for k in (2, 3, 4):
        assert detect_two_pole(fit_rational(data, k), 1e-4) is None


def test_detect_rejects_asymmetric_poles():
    model = RationalModel(np.array([-0.1, 0.2]), np.stack([np.eye(2), np.eye(2)]), 0.0)
    assert detect_two_pole(model) is None
    model = RationalModel(np.array([0.1]), np.eye(2)[None], 0.0)
    assert detect_two_pole(model) is None
    model = RationalModel(np.array([0.0]), np.diag([1.0, 2.0])[None], 0.0)
    assert detect_two_pole(model) is None


def test_model_serialization():
    model = fit_rational(samples(problem("ellipse"), ELLIPSE_MUS), 2)
    back = RationalModel.from_dict(model.to_dict())
    np.testing.assert_array_equal(back.poles, model.poles)
    np.testing.assert_array_equal(back.residues, model.residues)
    mu = 1.7 + 0.2j
    np.testing.assert_allclose(back(mu), model(mu))
    assert back(np.array([1.0, 2.0])).shape == (2, 2, 2)


def test_two_pole_tensor_ellipse_identity():
    # lam = 1/6, r+^2 = 2 pi, r-^2 = 0 is the tensor of the ellipse with
    # half axis 1 along x and 2 along y
    m = two_pole_tensor(1.0, 1 / 6, 2 * np.pi, 0.0)
    np.testing.assert_allclose(m, np.diag([12 * np.pi / 5, 12 * np.pi / 7]), atol=1e-14)
    e = recover_ellipse(TwoPoleCertificate(1 / 6, 2 * np.pi, 0.0, 0.0))
    assert ellipse_distance(e, EllipseParams.canonical(1, 2, 0)) < 1e-14
    assert e.phi == pytest.approx(np.pi / 2)
