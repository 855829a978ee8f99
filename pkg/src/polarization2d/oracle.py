"""Reference values built independently of the main assembly.

Nothing here imports the geometry or layer-operator modules: curves are
re-coded as complex functions, the double layer matrix is re-derived with
complex arithmetic, and analytic formulas cover the disk and the ellipse.
Fixtures are written as versioned JSON and regenerated by the ``oracle``
CLI subcommand.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad

from .errors import NoConvergence

__all__ = [
    "Fixture",
    "oracle_circle_spectra",
    "oracle_ellipse_spectrum",
    "oracle_ellipse_tensor",
    "oracle_ellipse_tensor_classical",
    "oracle_ellipse_perimeter",
    "naive_quantity",
    "oracle_refine",
    "generate_fixtures",
    "write_fixtures",
    "read_fixtures",
    "FIXTURE_VERSION",
]

FIXTURE_VERSION = 1


# -- analytic formulas -------------------------------------------------------

def oracle_circle_spectra(radius: float, n: int):
    """Exact spectra of the disk operators on an ``n``-point grid.

    On the circle of radius ``rho`` the Fourier mode ``m`` is an
    eigenfunction of S with eigenvalue ``-rho log rho`` for ``m = 0`` and
    ``rho / (2|m|)`` otherwise; K has the constant eigenfunction with
    eigenvalue -1/2 and annihilates every other mode.

    Returns
    -------
    dict
        ``{"S": ascending array of n values, "K": ascending array}``; the
        modes are ``m = -n/2 + 1, ..., n/2``.
    """
    if not 0 < radius < 1:
        raise ValueError("radius must lie in (0, 1)")
    m = np.arange(-n // 2 + 1, n // 2 + 1)
    s = np.where(m == 0, -radius * np.log(radius), radius / (2 * np.maximum(np.abs(m), 1)))
    k = np.where(m == 0, -0.5, 0.0)
    return {"S": np.sort(s), "K": np.sort(k)}


def oracle_ellipse_spectrum(a: float, b: float, m_max: int):
    """Fredholm eigenvalue pairs ``+-(1/2) q^m`` with ``q = |a - b| / (a + b)``."""
    q = abs(a - b) / (a + b)
    m = np.arange(1, m_max + 1)
    return 0.5 * q**m


def oracle_ellipse_tensor(a: float, b: float, phi: float, mu):
    """Closed-form two-pole tensor of the ellipse with half axis ``a`` at ``phi``.

    In the axis frame ``M = pi a b diag(1/(mu - lam), 1/(mu + lam))`` with
    ``lam = (b - a) / (2 (a + b))``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("half axes must be positive")
    mu = complex(mu)
    lam = (b - a) / (2 * (a + b))
    mass = np.pi * a * b
    d = np.diag([mass / (mu - lam), mass / (mu + lam)])
    c, s = np.cos(phi), np.sin(phi)
    q = np.array([[c, -s], [s, c]])
    return q @ d @ q.T


def oracle_ellipse_tensor_classical(a: float, b: float, phi: float, k: float):
    """Classical conductivity form ``(k - 1)|E| (a + b) / (k a + b)`` per axis.

    ``k`` is the conductivity ratio; it corresponds to the contrast
    ``mu = (k + 1) / (2 (k - 1))``.
    """
    area = np.pi * a * b
    d = np.diag([(k - 1) * area * (a + b) / (k * a + b),
                 (k - 1) * area * (a + b) / (a + k * b)])
    c, s = np.cos(phi), np.sin(phi)
    q = np.array([[c, -s], [s, c]])
    return q @ d @ q.T


def oracle_ellipse_perimeter(a: float, b: float) -> float:
    """Perimeter by adaptive quadrature of the speed."""
    val, _ = quad(lambda t: np.hypot(a * np.sin(t), b * np.cos(t)), 0.0, 2 * np.pi,
                  epsabs=1e-13, epsrel=1e-13, limit=200)
    return float(val)


# -- naive Nystrom -----------------------------------------------------------

def _curve(domain: dict):
    """Complex parametrization ``z(t), z'(t), z''(t)`` of a named domain."""
    kind = domain["kind"]
    if kind == "ellipse":
        a, b = domain["a"], domain["b"]
        rot = np.exp(1j * domain.get("phi", 0.0))
        return (lambda t: rot * (a * np.cos(t) + 1j * b * np.sin(t)),
                lambda t: rot * (-a * np.sin(t) + 1j * b * np.cos(t)),
                lambda t: rot * (-a * np.cos(t) - 1j * b * np.sin(t)))
    if kind == "kite":
        c = domain.get("scale", 1.0)
        return (lambda t: c * (np.cos(t) + 0.65 * np.cos(2 * t) - 0.65 + 1.5j * np.sin(t)),
                lambda t: c * (-np.sin(t) - 1.3 * np.sin(2 * t) + 1.5j * np.cos(t)),
                lambda t: c * (-np.cos(t) - 2.6 * np.cos(2 * t) - 1.5j * np.sin(t)))
    if kind == "star":
        c0, amp, k = domain.get("c0", 1.0), domain.get("amp", 0.3), domain.get("k", 3)
        # z = r(t) e^{it}
        def r(t, d):
            if d == 0:
                return c0 * (1 + amp * np.cos(k * t))
            if d == 1:
                return -c0 * amp * k * np.sin(k * t)
            return -c0 * amp * k * k * np.cos(k * t)
        e = lambda t: np.exp(1j * t)
        return (lambda t: r(t, 0) * e(t),
                lambda t: (r(t, 1) + 1j * r(t, 0)) * e(t),
                lambda t: (r(t, 2) + 2j * r(t, 1) - r(t, 0)) * e(t))
    raise ValueError(f"oracle does not know domain kind {kind!r}")


def _nystrom(domain: dict, n: int):
    z, dz, ddz = _curve(domain)
    t = 2 * np.pi * np.arange(n) / n
    p, dp, ddp = z(t), dz(t), ddz(t)
    speed = np.abs(dp)
    nu = -1j * dp / speed
    w = 2 * np.pi / n * speed
    # d/dnu(y) of -log|x-y|/(2pi) = Re((x-y) conj(nu_y)) / (2pi |x-y|^2)
    diff = p[:, None] - p[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        kern = np.real(diff * np.conj(nu)[None, :]) / (2 * np.pi * np.abs(diff) ** 2)
    kappa = np.imag(np.conj(dp) * ddp) / speed**3
    kern[np.diag_indices(n)] = -kappa / (4 * np.pi)
    return p, nu, w, kern * w[None, :]


def naive_quantity(domain: dict, quantity: str, n: int):
    """Evaluate ``quantity`` on an ``n``-point naive discretization.

    ``quantity`` is ``"area"``, ``"eigenvalue:j"`` (the ``j``-th largest
    eigenvalue of K, ``j = 1`` leading) or ``"Mkl:mu"`` such as ``"M11:2"``.
    """
    p, nu, w, K = _nystrom(domain, n)
    if quantity == "area":
        return float(0.5 * np.sum(np.real(p * np.conj(nu)) * w))
    kind, _, arg = quantity.partition(":")
    if kind == "eigenvalue":
        ev = np.sort(np.linalg.eigvals(K).real)[::-1]
        return float(ev[int(arg) - 1])
    if len(kind) == 3 and kind[0] == "M" and kind[1:] in ("11", "12", "21", "22"):
        k, l = int(kind[1]) - 1, int(kind[2]) - 1
        mu = complex(arg)
        xs = [p.real, p.imag]
        ns = [nu.real, nu.imag]
        u = np.linalg.solve(mu * np.eye(n) - K, xs[k].astype(complex))
        val = np.sum(ns[l] * u * w)
        return float(val.real) if mu.imag == 0 else complex(val)
    raise ValueError(f"unknown quantity {quantity!r}")


def oracle_refine(domain: dict, quantity: str, n_sequence, target: float):
    """Self-convergence reference for a non-analytic quantity.

    Evaluates on each ``n`` and accepts the value at the largest ``n`` if
    the last two refinements differ by at most ``target / 10``.

    Returns
    -------
    value, error_bar, history
        ``error_bar`` is the last refinement difference; ``history`` lists
        ``(n, value)``.

    Raises
    ------
    NoConvergence
    """
    ns = list(n_sequence)
    if len(ns) < 2:
        raise ValueError("need at least two resolutions")
    history = [(int(n), naive_quantity(domain, quantity, int(n))) for n in ns]
    err = abs(history[-1][1] - history[-2][1])
    if not err <= target / 10:
        raise NoConvergence(
            f"{quantity} on {domain['kind']}: last refinement changed by {err:.3g} "
            f"(target {target:g})"
        )
    return history[-1][1], float(err), history


# -- fixtures ----------------------------------------------------------------

@dataclass
class Fixture:
    """A reference value with its tolerance and the way it was produced."""

    name: str
    inputs: dict
    expected: object
    tolerance: float
    provenance: str
    history: list = field(default_factory=list)


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, np.ndarray):
        return _jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def generate_fixtures():
    """All fixtures used by the test suite, in a fixed order."""
    out = []
    for m in (0, 3):
        spec = oracle_circle_spectra(0.5, 16)
        val = 0.5 * np.log(2) if m == 0 else 0.5 / (2 * m)
        assert np.any(np.isclose(spec["S"], val, rtol=0, atol=1e-15))
        out.append(Fixture(f"circle_S_rho0.5_m{m}", {"radius": 0.5, "mode": m}, float(val),
                           1e-12, "analytic Fourier eigenvalue of S on a circle"))
    out.append(Fixture("circle_K_spectrum", {"radius": 1.0}, [-0.5, 0.0], 1e-12,
                       "double layer kernel is constant on a circle"))
    out.append(Fixture("ellipse21_perimeter", {"a": 2.0, "b": 1.0},
                       oracle_ellipse_perimeter(2.0, 1.0), 1e-10,
                       "scipy.integrate.quad of the speed"))
    out.append(Fixture("ellipse21_eigenvalues", {"a": 2.0, "b": 1.0, "m_max": 5},
                       oracle_ellipse_spectrum(2.0, 1.0, 5).tolist(), 1e-6,
                       "pairs +-(1/2) q^m with q = (a-b)/(a+b)"))
    for phi, mu in ((0.0, 1.0), (np.pi / 2, 1.0), (0.0, -0.5), (np.pi / 6, 2.0)):
        m = oracle_ellipse_tensor(2.0, 1.0, phi, mu).real
        out.append(Fixture(f"ellipse21_tensor_phi{phi:.4f}_mu{mu:g}",
                           {"a": 2.0, "b": 1.0, "phi": phi, "mu": mu}, m.tolist(), 1e-7,
                           "closed-form two-pole ellipse tensor"))
    refs = [
        ({"kind": "kite"}, "area", (512, 1024, 2048), 1e-12),
        ({"kind": "kite"}, "eigenvalue:1", (256, 384, 512), 1e-8),
        ({"kind": "star", "c0": 1.0, "amp": 0.3, "k": 3}, "M11:2", (256, 384, 512), 1e-8),
    ]
    for domain, quantity, ns, target in refs:
        val, err, hist = oracle_refine(domain, quantity, ns, target)
        name = f"{domain['kind']}_{quantity.replace(':', '_')}"
        out.append(Fixture(name, {"domain": domain, "quantity": quantity, "n": list(ns)},
                           val, target,
                           f"self-convergence of a naive complex Nystrom solver "
                           f"(last change {err:.2e})", [list(h) for h in hist]))
    return out


def write_fixtures(path, fixtures=None):
    fixtures = generate_fixtures() if fixtures is None else fixtures
    doc = {"version": FIXTURE_VERSION,
           "fixtures": [_jsonable(asdict(f)) for f in fixtures]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return fixtures


def read_fixtures(path):
    """Fixtures by name."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != FIXTURE_VERSION:
        raise ValueError(f"unsupported fixture version {doc.get('version')}")
    return {d["name"]: Fixture(**d) for d in doc["fixtures"]}
