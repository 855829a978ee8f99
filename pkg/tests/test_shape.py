import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import problem
from polarization2d.errors import DegenerateCertificate, NoEquivalentEllipse
from polarization2d.geometry import Ellipse
from polarization2d.oracle import oracle_ellipse_tensor
from polarization2d.pipeline import Problem
from polarization2d.rational import TwoPoleCertificate, detect_two_pole, fit_rational
from polarization2d.shape import (EllipseParams, ellipse_distance, equivalent_ellipse,
                                  recover_ellipse)

PI = np.pi


def cert(lam, rp2, rm2, frame=0.0):
    return TwoPoleCertificate(lam, rp2, rm2, 0.0, frame)


def test_recover_axis_formula():
    # half axis sqrt(mass/pi) sqrt((1-2 lam)/(1+2 lam)) = 1 along arctan(r-/r+) = 0
    e = recover_ellipse(cert(1 / 6, 2 * PI, 0.0))
    assert (e.a, e.b) == pytest.approx((2, 1))
    assert e.phi == pytest.approx(PI / 2)


def test_recover_in_rotated_frame():
    e = recover_ellipse(cert(1 / 6, 2 * PI, 0.0), frame_angle=PI / 2)
    assert ellipse_distance(e, EllipseParams.canonical(2, 1, 0)) < 1e-14
    e = recover_ellipse(cert(1 / 6, PI, PI, PI / 2))
    assert ellipse_distance(e, EllipseParams.canonical(2, 1, PI / 4)) < 1e-14


def test_recover_disk():
    e = recover_ellipse(cert(0.0, PI, 0.0))
    assert e.a == pytest.approx(1) and e.b == pytest.approx(1)
    assert e.phi == 0 and e.angle_undefined


def test_recover_errors():
    with pytest.raises(DegenerateCertificate):
        recover_ellipse(cert(0.1, 0.0, 0.0))
    with pytest.raises(DegenerateCertificate):
        recover_ellipse(cert(0.5, 1.0, 0.0))


def test_equivalent_ellipse_examples():
    e = equivalent_ellipse(np.diag([12 * PI / 7, 12 * PI / 5]), 1.0)
    assert ellipse_distance(e, EllipseParams.canonical(2, 1, 0)) < 1e-12
    e = equivalent_ellipse(PI * np.eye(2), 1.0)
    assert e.angle_undefined and e.a == pytest.approx(1)


def test_equivalent_ellipse_errors():
    with pytest.raises(NoEquivalentEllipse):
        equivalent_ellipse(np.diag([1.0, -1.0]), 1.0)
    with pytest.raises(NoEquivalentEllipse):
        equivalent_ellipse(-np.eye(2), 1.0)
    # strongly anisotropic tensor forces |lambda| >= 1/2
    with pytest.raises(NoEquivalentEllipse):
        equivalent_ellipse(np.diag([1.0, 100.0]), 1.0)
    with pytest.raises(ValueError):
        equivalent_ellipse(np.eye(2), 0.2)


def test_kite_equivalent_ellipse_drifts():
    p = problem("kite")
    e1 = equivalent_ellipse(p.tensor(0.75), 0.75)
    e2 = equivalent_ellipse(p.tensor(3.0), 3.0)
    assert ellipse_distance(e1, e2) > 1e-3


@pytest.mark.parametrize("mu", [-5.0, -0.6, 0.5, 0.75, 2.0, 10.0])
def test_equivalent_ellipse_of_ellipse_is_fixed(mu):
    p = Problem(Ellipse(1.5, 0.7, 1.1), 256)
    e = equivalent_ellipse(p.tensor(mu), mu)
    assert ellipse_distance(e, EllipseParams.canonical(1.5, 0.7, 1.1)) < 1e-6


@settings(max_examples=40, deadline=None)
@given(a=st.floats(0.2, 3), b=st.floats(0.2, 3), phi=st.floats(0, PI),
       mu=st.sampled_from([-4.0, -1.0, 0.6, 1.0, 3.0]))
def test_equivalent_ellipse_inverts_closed_form(a, b, phi, mu):
    e = equivalent_ellipse(oracle_ellipse_tensor(a, b, phi, mu).real, mu)
    ref = EllipseParams.canonical(a, b, phi)
    if abs(a - b) < 1e-6:
        assert max(abs(e.a - ref.a), abs(e.b - ref.b)) < 1e-6
    else:
        assert ellipse_distance(e, ref) < 1e-8


def test_reflection_blindness():
    # the point reflection -Omega has the same tensor, hence the same ellipse
    mus = [-5, -2, -1, -0.6, 0.6, 1, 2, 5]
    ell = Ellipse(2.2, 0.9, 0.5, (0.3, -0.2))
    out = []
    for curve in (ell, ell.transformed(rotation=-np.eye(2))):
        p = Problem(curve, 256)
        model = fit_rational([(mu, p.tensor(mu).m) for mu in mus], 2)
        out.append(recover_ellipse(detect_two_pole(model)))
    assert ellipse_distance(out[0], out[1]) < 1e-8
    assert ellipse_distance(out[0], EllipseParams.canonical(2.2, 0.9, 0.5)) < 1e-8


@pytest.mark.parametrize("seed", range(10))
def test_round_trip_small_sweep(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(0.2, 3, 2)
    phi = rng.uniform(0, PI)
    p = Problem(Ellipse(a, b, phi), 256)
    model = fit_rational([(mu, p.tensor(mu).m) for mu in [-5, -2, -1, -0.6, 0.6, 1, 2, 5]], 2)
    e = recover_ellipse(detect_two_pole(model, 1e-6))
    assert ellipse_distance(e, EllipseParams.canonical(a, b, phi)) <= 1e-5


def test_canonical_params():
    e = EllipseParams.canonical(1.0, 2.0, 0.3)
    assert (e.a, e.b) == (2.0, 1.0) and e.phi == pytest.approx(0.3 + PI / 2)
    assert EllipseParams.canonical(2.0, 1.0, PI).phi == 0.0
    assert EllipseParams.canonical(1.0, 1.0, 0.7).phi == 0.0
    assert EllipseParams.canonical(2.0, 1.0, 0).area == pytest.approx(2 * PI)
    with pytest.raises(ValueError):
        EllipseParams.canonical(0.0, 1.0, 0.0)


def test_distance_mod_pi():
    e1 = EllipseParams.canonical(2, 1, 0.01)
    e2 = EllipseParams.canonical(2, 1, PI - 0.01)
    assert ellipse_distance(e1, e2) == pytest.approx(0.02)
