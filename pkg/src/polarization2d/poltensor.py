"""Polarization tensor evaluation.

``M_kl(mu) = integral nu_l (mu I - K)^(-1) x_k ds`` is computed three
independent ways: by a direct solve with K, by the dual solve with the
adjoint restricted to mean-free densities (which stays valid at
``mu = -1/2``), and by summing the spectral measures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContrastNearSpectrum, NotOrthogonal, SolveFailure
from .geometry import DiscreteBoundary
from .layerops import DenseOperator
from .spectral import SpectralData

__all__ = [
    "PolTensor",
    "pol_direct",
    "pol_dual",
    "pol_spectral",
    "polarization_tensor",
    "transform_tensor",
    "spectral_distance",
]

GUARD = 1e-6
WARN_DISTANCE = 1e-3


@dataclass(frozen=True, eq=False)
class PolTensor:
    """Value of the tensor at one contrast.

    ``defect`` is the relative asymmetry ``|m12 - m21| / ||m||`` before
    symmetrization; ``distance`` the distance from ``mu`` to the nearest
    relevant eigenvalue. ``condition_warning`` is set when that distance is
    below the warning threshold.
    """

    mu: complex
    m: np.ndarray
    method: str
    defect: float = 0.0
    distance: float = np.inf
    condition_warning: bool = False

    @property
    def is_real(self):
        return bool(np.all(np.abs(self.m.imag) <= 1e-10 * max(np.abs(self.m).max(), 1e-300)))

    def real(self):
        return np.real(self.m)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.m, dtype=dtype)


def spectral_distance(mu, eigenvalues):
    """Nearest eigenvalue and its distance from ``mu``."""
    ev = np.asarray(eigenvalues)
    if ev.size == 0:
        return None, np.inf
    d = np.abs(ev - mu)
    j = int(np.argmin(d))
    return ev[j], float(d[j])


def _guard(mu, eigenvalues, guard, warn_distance):
    lam, dist = spectral_distance(mu, eigenvalues)
    if dist < guard:
        lam_out = complex(lam)
        raise ContrastNearSpectrum(lam_out.real if lam_out.imag == 0 else lam_out, mu, dist)
    return dist, dist < warn_distance


def _symmetrize(m, method, mu, dist, warn):
    m = np.asarray(m, dtype=complex)
    scale = np.abs(m).max()
    defect = float(abs(m[0, 1] - m[1, 0]) / scale) if scale > 0 else 0.0
    off = 0.5 * (m[0, 1] + m[1, 0])
    m = m.copy()
    m[0, 1] = m[1, 0] = off
    return PolTensor(mu=complex(mu), m=m, method=method, defect=defect,
                     distance=dist, condition_warning=bool(warn))


def _solve(system, rhs):
    try:
        return np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(str(exc)) from exc


def pol_direct(db: DiscreteBoundary, K: DenseOperator, mu, guard=GUARD,
               warn_distance=WARN_DISTANCE) -> PolTensor:
    """Solve ``(mu I - K) u_k = x_k`` and integrate ``nu_l u_k``.

    Works on any discretization (K's spectrum is scale invariant).
    """
    mu = complex(mu)
    dist, warn = _guard(mu, K.eigenvalues, guard, warn_distance)
    system = mu * np.eye(db.n) - K.matrix
    u = _solve(system, db.x.astype(complex))
    m = np.einsum("jk,jl,j->kl", u, db.nu, db.w)
    return _symmetrize(m, "direct", mu, dist, warn)


def pol_dual(db: DiscreteBoundary, K: DenseOperator, mu, guard=GUARD,
             warn_distance=WARN_DISTANCE) -> PolTensor:
    """Solve with the adjoint of K on mean-free densities.

    The constant direction is deflated so the trivial eigenvalue -1/2 is
    absent; ``mu = -1/2`` is allowed.
    """
    mu = complex(mu)
    ev = np.asarray(K.eigenvalues)
    ev = np.delete(ev, int(np.argmin(np.abs(ev + 0.5))))
    dist, warn = _guard(mu, ev, guard, warn_distance)
    n = db.n
    w = db.w
    Kadj = K.adjoint.matrix
    ones = np.ones(n)
    # projector onto mean-free densities and onto constants
    Pi = np.outer(ones, w) / w.sum()
    P = np.eye(n) - Pi
    B = P @ Kadj @ P
    system = mu * np.eye(n) - B - (mu - 1.0) * Pi
    chi = _solve(system, (P @ db.nu).astype(complex))
    m = np.einsum("jk,jl,j->kl", db.x, chi, w)
    return _symmetrize(m, "dual", mu, dist, warn)


def pol_spectral(sd: SpectralData, mu, guard=GUARD, warn_distance=WARN_DISTANCE) -> PolTensor:
    """Pole sum over the spectral clusters."""
    mu = complex(mu)
    dist, warn = _guard(mu, sd.lam, guard, warn_distance)
    r = 1.0 / (mu - sd.lam)
    m11 = np.sum(sd.alpha * r)
    m22 = np.sum(sd.beta * r)
    m12 = np.sum(sd.gamma * r)
    m = np.array([[m11, m12], [m12, m22]])
    return PolTensor(mu=mu, m=m, method="spectral", defect=0.0,
                     distance=dist, condition_warning=bool(warn))


def polarization_tensor(db, K, mu, method="auto", sd=None, guard=GUARD,
                        warn_distance=WARN_DISTANCE) -> PolTensor:
    """Dispatch on ``method``; ``auto`` uses the dual solve near ``-1/2``."""
    if method == "auto":
        method = "dual" if abs(complex(mu) + 0.5) < 1e-3 else "direct"
    if method == "direct":
        return pol_direct(db, K, mu, guard, warn_distance)
    if method == "dual":
        return pol_dual(db, K, mu, guard, warn_distance)
    if method == "spectral":
        if sd is None:
            raise ValueError("spectral method needs SpectralData")
        return pol_spectral(sd, mu, guard, warn_distance)
    raise ValueError(f"unknown method {method!r}")


def transform_tensor(M: PolTensor, Q, c: float) -> PolTensor:
    """Tensor of ``c Q(Omega)`` from that of ``Omega``: ``c^2 Q M Q^T``."""
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (2, 2) or np.abs(Q @ Q.T - np.eye(2)).max() > 1e-12:
        raise NotOrthogonal(f"Q is not orthogonal:\n{Q}")
    if c <= 0:
        raise ValueError("scale factor must be positive")
    m = c**2 * Q @ M.m @ Q.T
    return PolTensor(mu=M.mu, m=m, method=M.method, defect=M.defect,
                     distance=M.distance, condition_warning=M.condition_warning)
