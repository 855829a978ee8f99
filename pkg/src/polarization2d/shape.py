"""Ellipse geometry from two-pole tensors."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateCertificate, NoEquivalentEllipse
from .poltensor import PolTensor
from .rational import TwoPoleCertificate

__all__ = ["EllipseParams", "recover_ellipse", "equivalent_ellipse", "ellipse_distance"]

DISK_TOL = 1e-9


@dataclass(frozen=True)
class EllipseParams:
    """Half axes ``a >= b``; ``a`` points at angle ``phi`` in ``[0, pi)``.

    Polarization tensors cannot see translations, so the center is always
    the origin.
    """

    a: float
    b: float
    phi: float
    angle_undefined: bool = False
    center: tuple = (0.0, 0.0)

    @property
    def area(self):
        return np.pi * self.a * self.b

    @classmethod
    def canonical(cls, a, b, phi):
        if a <= 0 or b <= 0:
            raise ValueError("half axes must be positive")
        if b > a:
            a, b, phi = b, a, phi + np.pi / 2
        if abs(a - b) <= DISK_TOL * a:
            return cls(float(a), float(b), 0.0, True)
        phi = float(np.mod(phi, np.pi))
        if np.isclose(phi, np.pi, rtol=0, atol=1e-15):
            phi = 0.0
        return cls(float(a), float(b), phi, False)


def _axes(mass, lam):
    if not -0.5 < lam < 0.5:
        raise NoEquivalentEllipse(f"pole {lam:.6g} outside (-1/2, 1/2)")
    size = np.sqrt(mass / np.pi)
    ratio = np.sqrt((1 - 2 * lam) / (1 + 2 * lam))
    return size * ratio, size / ratio


def recover_ellipse(cert: TwoPoleCertificate, frame_angle=None) -> EllipseParams:
    """Ellipse with the tensor described by ``cert``.

    With ``r+^2 + r-^2 = |Omega|`` the half axis along the angle
    ``arctan(r-/r+)`` (measured in the certificate frame) has length
    ``sqrt(|Omega|/pi) * sqrt((1 - 2 lam)/(1 + 2 lam))``; the other one is
    ``sqrt(|Omega|/pi) * sqrt((1 + 2 lam)/(1 - 2 lam))``.
    """
    if frame_angle is None:
        frame_angle = cert.frame_angle
    mass = cert.r_plus_sq + cert.r_minus_sq
    if mass <= 0:
        raise DegenerateCertificate("r+^2 + r-^2 must be positive")
    if not 0 <= cert.lam < 0.5:
        raise DegenerateCertificate(f"lambda = {cert.lam} outside [0, 1/2)")
    a, b = _axes(mass, cert.lam)
    if cert.lam < DISK_TOL:
        r = np.sqrt(mass / np.pi)
        return EllipseParams(float(r), float(r), 0.0, True)
    phi = np.arctan2(np.sqrt(max(cert.r_minus_sq, 0.0)), np.sqrt(max(cert.r_plus_sq, 0.0)))
    return EllipseParams.canonical(a, b, phi + frame_angle)


def equivalent_ellipse(M, mu: float) -> EllipseParams:
    """The ellipse sharing the tensor ``M`` at the single contrast ``mu``.

    Raises
    ------
    NoEquivalentEllipse
        If ``M`` is not real symmetric definite with a solution
        ``ab > 0`` and ``|lambda| < 1/2``.
    """
    m = M.m if isinstance(M, PolTensor) else np.asarray(M)
    mu = complex(mu)
    if abs(mu.imag) > 0 or abs(mu.real) < 0.5:
        raise ValueError("equivalent ellipses need real mu with |mu| >= 1/2")
    mu = mu.real
    if np.abs(np.imag(m)).max() > 1e-10 * np.abs(m).max():
        raise NoEquivalentEllipse("tensor is not real")
    m = np.real(m)
    m = 0.5 * (m + m.T)
    vals, vecs = np.linalg.eigh(m)
    m1, m2 = vals[1], vals[0]
    e1 = vecs[:, 1]
    if m1 * m2 <= 0 or m1 + m2 == 0:
        raise NoEquivalentEllipse("tensor is not definite")
    mass = 2 * mu * m1 * m2 / (m1 + m2)
    if mass <= 0:
        raise NoEquivalentEllipse(f"derived area {mass:.6g} is not positive")
    lam = 0.5 * mass * (1 / m2 - 1 / m1)
    base = np.arctan2(e1[1], e1[0])
    if lam < 0:
        # direction e1 carries pole -|lam|: relabel to the orthogonal axis
        lam, base = -lam, base + np.pi / 2
    if lam >= 0.5:
        raise NoEquivalentEllipse(f"derived pole {lam:.6g} outside (-1/2, 1/2)")
    a, b = _axes(mass, lam)
    if lam < DISK_TOL:
        r = np.sqrt(mass / np.pi)
        return EllipseParams(float(r), float(r), 0.0, True)
    return EllipseParams.canonical(a, b, base)


def ellipse_distance(e1: EllipseParams, e2: EllipseParams) -> float:
    """Largest of the axis errors and the angle error modulo pi.

    The angle is ignored when either ellipse is (numerically) a disk.
    """
    d = max(abs(e1.a - e2.a), abs(e1.b - e2.b))
    if e1.angle_undefined or e2.angle_undefined:
        return d
    dphi = abs(np.mod(e1.phi - e2.phi + np.pi / 2, np.pi) - np.pi / 2)
    return max(d, dphi)
