"""Boundary curves, their trapezoidal discretization and normalization.

All curves are 2*pi-periodic, counterclockwise and at least C^2. A curve
knows its point, first and second derivative at arbitrary parameter values;
everything else (normals, weights, curvature) is derived in
:func:`discretize`.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import NonRegularCurve, SelfIntersection

__all__ = [
    "BoundaryCurve",
    "Ellipse",
    "Kite",
    "Star",
    "FourierCurve",
    "TransformedCurve",
    "DiscreteBoundary",
    "NormalizationTransform",
    "discretize",
    "area",
    "centroid",
    "normalize",
    "builtin_curve",
    "BUILTIN_DOMAINS",
]


def _rotation(phi):
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


class BoundaryCurve(ABC):
    """A closed, counterclockwise, 2*pi-periodic parametrized curve."""

    kind: str = "abstract"

    @abstractmethod
    def evaluate(self, t):
        """Return ``(x, dx, ddx)``, each of shape ``(len(t), 2)``."""

    def points(self, t):
        return self.evaluate(np.atleast_1d(t))[0]

    def transformed(self, scale=1.0, rotation=None, offset=(0.0, 0.0)):
        """Image of the curve under ``x -> scale * Q x + offset``."""
        q = np.eye(2) if rotation is None else np.asarray(rotation, dtype=float)
        return TransformedCurve(self, float(scale), q, np.asarray(offset, dtype=float))


@dataclass(frozen=True)
class Ellipse(BoundaryCurve):
    """Ellipse with half axis ``a`` at angle ``phi`` and ``b`` orthogonal to it."""

    a: float
    b: float
    phi: float = 0.0
    center: tuple = (0.0, 0.0)
    kind = "ellipse"

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError("ellipse half axes must be positive")

    def evaluate(self, t):
        c, s = np.cos(t), np.sin(t)
        q = _rotation(self.phi)
        x = np.column_stack([self.a * c, self.b * s]) @ q.T + np.asarray(self.center)
        dx = np.column_stack([-self.a * s, self.b * c]) @ q.T
        ddx = np.column_stack([-self.a * c, -self.b * s]) @ q.T
        return x, dx, ddx


@dataclass(frozen=True)
class Kite(BoundaryCurve):
    """The kite ``(cos t + 0.65 cos 2t - 0.65, 1.5 sin t)``, optionally scaled."""

    scale: float = 1.0
    kind = "kite"

    def evaluate(self, t):
        c, s = np.cos(t), np.sin(t)
        c2, s2 = np.cos(2 * t), np.sin(2 * t)
        x = np.column_stack([c + 0.65 * c2 - 0.65, 1.5 * s])
        dx = np.column_stack([-s - 1.3 * s2, 1.5 * c])
        ddx = np.column_stack([-c - 2.6 * c2, -1.5 * s])
        return self.scale * x, self.scale * dx, self.scale * ddx


@dataclass(frozen=True)
class Star(BoundaryCurve):
    """Star-shaped curve with radius ``c0 * (1 + amp * cos(k t))``.

    The curve is cyclic with index ``k``.
    """

    c0: float = 1.0
    amp: float = 0.3
    k: int = 3
    kind = "star"

    def __post_init__(self):
        if self.c0 <= 0:
            raise ValueError("star radius c0 must be positive")
        if not 0 <= self.amp < 1:
            raise ValueError("star amplitude must lie in [0, 1)")

    def evaluate(self, t):
        k = self.k
        r = self.c0 * (1 + self.amp * np.cos(k * t))
        dr = -self.c0 * self.amp * k * np.sin(k * t)
        ddr = -self.c0 * self.amp * k * k * np.cos(k * t)
        c, s = np.cos(t), np.sin(t)
        x = np.column_stack([r * c, r * s])
        dx = np.column_stack([dr * c - r * s, dr * s + r * c])
        ddx = np.column_stack(
            [ddr * c - 2 * dr * s - r * c, ddr * s + 2 * dr * c - r * s]
        )
        return x, dx, ddx


@dataclass(frozen=True)
class FourierCurve(BoundaryCurve):
    """Curve given by truncated Fourier series of both coordinates.

    ``x(t) = sum_m x_cos[m] cos(m t) + x_sin[m] sin(m t)``, likewise for y;
    index ``m`` starts at 0 (``x_sin[0]`` is ignored).
    """

    x_cos: tuple
    x_sin: tuple
    y_cos: tuple
    y_sin: tuple
    kind = "custom"

    def evaluate(self, t):
        out = []
        for cos_c, sin_c in ((self.x_cos, self.x_sin), (self.y_cos, self.y_sin)):
            cc = np.asarray(cos_c, dtype=float)
            sc = np.asarray(sin_c, dtype=float)
            m_max = max(len(cc), len(sc))
            cc = np.pad(cc, (0, m_max - len(cc)))
            sc = np.pad(sc, (0, m_max - len(sc)))
            m = np.arange(m_max)
            C = np.cos(np.outer(t, m))
            S = np.sin(np.outer(t, m))
            f = C @ cc + S @ sc
            df = -S @ (m * cc) + C @ (m * sc)
            ddf = -C @ (m**2 * cc) - S @ (m**2 * sc)
            out.append((f, df, ddf))
        (x, dx, ddx), (y, dy, ddy) = out
        return (
            np.column_stack([x, y]),
            np.column_stack([dx, dy]),
            np.column_stack([ddx, ddy]),
        )


@dataclass(frozen=True, eq=False)
class TransformedCurve(BoundaryCurve):
    """Image ``scale * rotation @ x + offset`` of a base curve.

    Improper orthogonal maps reverse the parametrization so the image stays
    counterclockwise.
    """

    base: BoundaryCurve
    scale: float
    rotation: np.ndarray
    offset: np.ndarray

    @property
    def kind(self):
        return self.base.kind

    def evaluate(self, t):
        q = self.rotation
        if np.linalg.det(q) < 0:
            x, dx, ddx = self.base.evaluate(-np.asarray(t))
            dx = -dx
        else:
            x, dx, ddx = self.base.evaluate(t)
        c = self.scale
        return c * x @ q.T + self.offset, c * dx @ q.T, c * ddx @ q.T


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteBoundary:
    """Trapezoidal discretization of a boundary curve at ``n`` uniform nodes."""

    curve: BoundaryCurve
    n: int
    t: np.ndarray
    x: np.ndarray
    dx: np.ndarray
    ddx: np.ndarray
    speed: np.ndarray
    nu: np.ndarray
    w: np.ndarray
    kappa: np.ndarray

    @property
    def length(self):
        return float(self.w.sum())

    @property
    def h(self):
        """Local mesh width at each node."""
        return self.w


def _check_simple(x, h):
    n = len(x)
    tree = cKDTree(x)
    pairs = tree.query_pairs(0.1 * float(h.max()), output_type="ndarray")
    if len(pairs) == 0:
        return
    i, j = pairs[:, 0], pairs[:, 1]
    gap = np.abs(i - j)
    gap = np.minimum(gap, n - gap)
    dist = np.linalg.norm(x[i] - x[j], axis=1)
    bad = (gap >= 2) & (dist < 0.1 * np.minimum(h[i], h[j]))
    if np.any(bad):
        k = int(np.argmax(bad))
        raise SelfIntersection(
            f"nodes {i[k]} and {j[k]} are {dist[k]:.3g} apart "
            f"(local mesh width {min(h[i[k]], h[j[k]]):.3g})"
        )


def discretize(curve: BoundaryCurve, n: int) -> DiscreteBoundary:
    """Sample ``curve`` at ``n`` equispaced parameter values.

    Raises
    ------
    ValueError
        If ``n`` is odd or smaller than 16.
    NonRegularCurve
        If ``|x'(t_j)| < 1e-12`` at some node.
    SelfIntersection
        If two non-adjacent nodes are closer than a tenth of the mesh width.
    """
    n = int(n)
    if n < 16 or n % 2:
        raise ValueError(f"node count must be even and >= 16, got {n}")
    t = 2 * np.pi * np.arange(n) / n
    x, dx, ddx = curve.evaluate(t)
    speed = np.hypot(dx[:, 0], dx[:, 1])
    if speed.min() < 1e-12:
        raise NonRegularCurve(f"|x'(t)| = {speed.min():.3g} at t = {t[speed.argmin()]:.6g}")
    nu = np.column_stack([dx[:, 1], -dx[:, 0]]) / speed[:, None]
    w = 2 * np.pi / n * speed
    kappa = (dx[:, 0] * ddx[:, 1] - dx[:, 1] * ddx[:, 0]) / speed**3
    _check_simple(x, w)
    signed_area = 0.5 * np.sum(np.einsum("ij,ij->i", x, nu) * w)
    if signed_area <= 0:
        raise NonRegularCurve("curve is not counterclockwise (non-positive signed area)")
    return DiscreteBoundary(
        curve=curve,
        n=n,
        t=_readonly(t),
        x=_readonly(x),
        dx=_readonly(dx),
        ddx=_readonly(ddx),
        speed=_readonly(speed),
        nu=_readonly(nu),
        w=_readonly(w),
        kappa=_readonly(kappa),
    )


def area(db: DiscreteBoundary) -> float:
    """Enclosed area ``1/2 * integral of x . nu ds``."""
    return float(0.5 * np.sum(np.einsum("ij,ij->i", db.x, db.nu) * db.w))


def centroid(db: DiscreteBoundary) -> np.ndarray:
    """Area centroid, from ``integral_Omega x_k = 1/2 * integral x_k^2 nu_k ds``."""
    moments = 0.5 * np.sum(db.x**2 * db.nu * db.w[:, None], axis=0)
    return moments / area(db)


@dataclass(frozen=True)
class NormalizationTransform:
    """``x -> scale * (x - shift)``."""

    shift: tuple
    scale: float

    def apply(self, points):
        return self.scale * (np.asarray(points) - np.asarray(self.shift))

    def inverse(self, points):
        return np.asarray(points) / self.scale + np.asarray(self.shift)


def normalize(curve: BoundaryCurve, n_probe: int = 1024):
    """Translate the centroid to the origin and shrink into the disk of radius 1/2.

    The scale is ``1 / (2 R)`` with ``R`` the largest node distance from the
    centroid on an ``n_probe``-point sampling. The rule is applied
    unconditionally, also to curves that already fit.

    Returns
    -------
    (BoundaryCurve, NormalizationTransform)
    """
    db = discretize(curve, n_probe)
    shift = centroid(db)
    radius = float(np.max(np.linalg.norm(db.x - shift, axis=1)))
    scale = 1.0 / (2.0 * radius)
    transform = NormalizationTransform(shift=tuple(float(s) for s in shift), scale=scale)
    return curve.transformed(scale=scale, offset=-scale * shift), transform


BUILTIN_DOMAINS = ("circle", "ellipse", "kite", "star")


def builtin_curve(name: str) -> BoundaryCurve:
    """The reference domains used throughout the test-suite."""
    if name == "circle":
        return Ellipse(1.0, 1.0)
    if name == "ellipse":
        return Ellipse(2.0, 1.0)
    if name == "kite":
        return Kite()
    if name == "star":
        return Star(1.0, 0.3, 3)
    raise KeyError(f"unknown built-in domain {name!r}")
