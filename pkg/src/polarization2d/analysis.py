"""Hashin-Shtrikman bounds and the large-contrast trace law.

For real ``|mu| >= 1/2``::

    (2/|mu|) |Omega| <= |Tr M| < 8|mu| / (4 mu^2 - 1) |Omega|
    |Tr M^-1| <= 2|mu| / |Omega|

The lower bound is attained only by disks, the second bound only by
ellipses; the upper bound is never attained.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .errors import SingularTensor
from .geometry import DiscreteBoundary, area
from .layerops import DenseOperator
from .poltensor import PolTensor, polarization_tensor

__all__ = [
    "BoundsReport",
    "hs_check",
    "trace_asymptotics",
    "concavity_profile",
    "EQUALITY_TOL",
]

EQUALITY_TOL = 1e-6


@dataclass(frozen=True)
class BoundsReport:
    """One contrast of the bound audit.

    Margins are signed slacks (``bound - value`` or ``value - bound``), so
    that a valid inequality has a nonnegative margin. Equality flags use
    ``|margin| < EQUALITY_TOL * bound``.
    """

    mu: float
    area: float
    trace_M: float
    trace_Minv: float
    lower1: float
    upper1: float
    bound2: float
    margin_lower1: float
    margin_upper1: float
    margin_bound2: float
    disk_equality: bool
    ellipse_equality: bool

    @property
    def holds(self):
        return (self.margin_lower1 >= -1e-8 * self.area
                and self.margin_upper1 > 0
                and self.margin_bound2 >= -1e-8 * self.bound2)

    def as_dict(self):
        return asdict(self)


def _real_mu(mu):
    mu_c = complex(mu)
    if mu_c.imag != 0:
        raise ValueError("bound checks need real mu")
    if abs(mu_c.real) < 0.5:
        raise ValueError("bound checks need |mu| >= 1/2")
    return mu_c.real


def hs_check(M, mu, area: float, tol: float = EQUALITY_TOL) -> BoundsReport:
    """Evaluate both isoperimetric inequalities for one tensor.

    Parameters
    ----------
    M : PolTensor or array_like
        Real symmetric tensor at ``mu``.
    mu : float
        Real contrast with ``|mu| >= 1/2``.
    area : float
        ``|Omega|``.

    Raises
    ------
    SingularTensor
        If ``|det M| <= 1e-14 ||M||^2``.
    """
    mu = _real_mu(mu)
    if area <= 0:
        raise ValueError("area must be positive")
    m = M.m if isinstance(M, PolTensor) else np.asarray(M)
    m = np.real(m).astype(float)
    det = float(np.linalg.det(m))
    if abs(det) <= 1e-14 * np.linalg.norm(m) ** 2:
        raise SingularTensor(f"det M = {det:.3g}")
    tr = float(np.trace(m))
    tr_inv = float(np.trace(np.linalg.inv(m)))
    amu = abs(mu)
    lower1 = 2.0 / amu * area
    denom = 4 * mu * mu - 1
    upper1 = 8 * amu / denom * area if denom > 0 else np.inf
    bound2 = 2 * amu / area
    m_lo = abs(tr) - lower1
    m_up = upper1 - abs(tr)
    m_b2 = bound2 - abs(tr_inv)
    return BoundsReport(
        mu=mu, area=float(area), trace_M=tr, trace_Minv=tr_inv,
        lower1=lower1, upper1=upper1, bound2=bound2,
        margin_lower1=m_lo, margin_upper1=m_up, margin_bound2=m_b2,
        disk_equality=bool(abs(m_lo) < tol * lower1),
        ellipse_equality=bool(abs(m_b2) < tol * bound2),
    )


def trace_asymptotics(db: DiscreteBoundary, K: DenseOperator, mus):
    """Table of ``mu * M_kk(mu)`` for large ``mu``.

    Returns
    -------
    list of tuple
        ``(mu, mu*M11, mu*M22, deviation)`` where ``deviation`` is the
        largest ``|mu M_kk - |Omega||``.
    """
    omega = area(db)
    rows = []
    for mu in mus:
        mu = float(mu)
        if abs(mu) < 10:
            raise ValueError("trace asymptotics need |mu| >= 10")
        m = polarization_tensor(db, K, mu).m.real
        d = mu * np.diag(m)
        rows.append((mu, float(d[0]), float(d[1]), float(np.max(np.abs(d - omega)))))
    return rows


def concavity_profile(mus, tensors):
    """Second differences of ``g(mu) = Tr M(mu)^-1`` on an increasing grid.

    ``g`` is concave for ``mu >= 1/2``, so the values should be
    nonpositive up to noise. Diagnostic only: discrete second differences
    amplify solver error.
    """
    mus = np.asarray(mus, dtype=float)
    if np.any(np.diff(mus) <= 0) or mus[0] < 0.5:
        raise ValueError("grid must increase and start at mu >= 1/2")
    g = np.array([np.trace(np.linalg.inv(np.real(np.asarray(t)))) for t in tensors])
    h1 = np.diff(mus)
    slopes = np.diff(g) / h1
    return 2 * np.diff(slopes) / (h1[1:] + h1[:-1])
