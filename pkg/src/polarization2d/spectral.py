"""Discrete spectral measures of the polarization tensor.

For the density ``phi`` solving ``(K - I/2) phi = x_1`` and an orthonormal
eigenbasis ``psi`` of the symmetrized operator ``A`` with eigenvalues
``lam``, put ``u = S^(-1/2) phi`` and ``v = S^(1/2) d_s phi``. The masses
carried by the eigenvalue ``lam`` are

    alpha = (1/4 - lam^2) (1/2 - lam) <psi, u>^2
    beta  = (1/2 + lam) <psi, v>^2
    gamma = (lam^2 - 1/4) <psi, v> <psi, u>

and ``M11 = sum alpha / (mu - lam)``, ``M22 = sum beta / (mu - lam)``,
``M12 = sum gamma / (mu - lam)``. Masses of numerically coincident
eigenvalues are summed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigFailure, SolveFailure, TrivialMassNonzero
from .geometry import BoundaryCurve, DiscreteBoundary, area, discretize, normalize
from .layerops import DenseOperator, assemble_A, assemble_K, assemble_S, sqrt_S

__all__ = [
    "SpectralData",
    "SmoothCoefficient",
    "eig_A",
    "arc_derivative",
    "dirichlet_density",
    "cluster_eigenvalues",
    "build_spectral_data",
    "smooth_coefficients",
    "spectral_data",
    "read_spectral_records",
    "write_spectral_records",
]


def eig_A(A: DenseOperator):
    """Eigendecomposition of the symmetrized operator.

    Returns
    -------
    values : ndarray
        Eigenvalues in ascending order.
    vectors : ndarray
        Nodal eigenvectors as columns, orthonormal in the weighted product.
    """
    try:
        values, vecs_w = np.linalg.eigh(A.weighted)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from exc
    return values, vecs_w / np.sqrt(A.db.w)[:, None]


def arc_derivative(db: DiscreteBoundary, f) -> np.ndarray:
    """Spectral derivative of nodal values with respect to arc length."""
    n = db.n
    k = np.fft.fftfreq(n, d=1.0 / n)
    k[n // 2] = 0.0
    if np.ndim(f) > 1:
        k = k.reshape((n,) + (1,) * (np.ndim(f) - 1))
    df = np.fft.ifft(1j * k * np.fft.fft(f, axis=0), axis=0)
    if np.isrealobj(f):
        df = df.real
    return df / db.speed if np.ndim(f) == 1 else df / db.speed[:, None]


def dirichlet_density(K: DenseOperator, db: DiscreteBoundary, component: int = 0,
                      rtol: float = 1e-10) -> np.ndarray:
    """Density ``phi`` of the double layer potential equal to ``x_k`` inside."""
    rhs = db.x[:, component]
    system = K.matrix - 0.5 * np.eye(db.n)
    try:
        phi = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure(str(exc)) from exc
    res = np.linalg.norm(system @ phi - rhs)
    if not np.isfinite(res) or res > rtol * np.linalg.norm(rhs):
        raise SolveFailure(f"relative residual {res / np.linalg.norm(rhs):.3g}")
    return phi


def cluster_eigenvalues(values, tol):
    """Group sorted eigenvalues into chains with consecutive gaps below ``tol``."""
    values = np.asarray(values)
    breaks = np.flatnonzero(np.diff(values) > tol) + 1
    return np.split(np.arange(len(values)), breaks)


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Eigenvalue clusters with their alpha, beta and gamma masses.

    Masses refer to the original (unnormalized) domain. The trivial
    eigenvalue -1/2 is excluded; its cluster value is kept in
    ``trivial_lambda``.
    """

    lam: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    area: float
    trivial_lambda: float = -0.5
    cluster_tol: float = 5e-7
    scale: float = 1.0
    n: int = 0

    def __len__(self):
        return len(self.lam)

    def partner(self, i):
        """Index of the cluster at ``-lam[i]``, or None."""
        j = int(np.argmin(np.abs(self.lam + self.lam[i])))
        if abs(self.lam[j] + self.lam[i]) <= 2 * self.cluster_tol:
            return j
        return None

    def alpha_at(self, value):
        """alpha mass of the cluster at ``value`` (0 if absent)."""
        d = np.abs(self.lam - value)
        j = int(np.argmin(d)) if len(d) else 0
        if len(d) and d[j] <= 2 * self.cluster_tol:
            return float(self.alpha[j])
        return 0.0

    @property
    def alpha_symm(self):
        return np.array([0.5 * (a + self.alpha_at(-l)) for l, a in zip(self.lam, self.alpha)])

    def rows(self):
        return list(zip(self.lam.tolist(), self.alpha.tolist(),
                        self.beta.tolist(), self.gamma.tolist()))


def build_spectral_data(A: DenseOperator, Shalf: DenseOperator, Sinvhalf: DenseOperator,
                        phi, db: DiscreteBoundary, scale: float = 1.0, eig=None,
                        trivial_tol: float = 1e-10, drop_below: float = 1e-12) -> SpectralData:
    """Cluster masses for a *normalized* discretization, mapped back by ``1/scale^2``.

    Parameters
    ----------
    scale
        Factor the original domain was shrunk by; masses scale like area.
    eig
        Precomputed ``eig_A(A)``.
    trivial_tol
        Maximal total mass (relative to the area) on the -1/2 cluster.
    drop_below
        Clusters with ``alpha + beta`` below ``drop_below * area`` are dropped.
    """
    values, vecs = eig_A(A) if eig is None else eig
    sq = np.sqrt(db.w)
    vecs_w = vecs * sq[:, None]
    u_w = Sinvhalf.weighted @ (sq * phi)
    v_w = Shalf.weighted @ (sq * arc_derivative(db, phi))
    pu = vecs_w.T @ u_w
    pv = vecs_w.T @ v_w
    a = (0.25 - values**2) * (0.5 - values) * pu**2
    b = (0.5 + values) * pv**2
    g = (values**2 - 0.25) * pv * pu

    radius = float(np.max(np.abs(values)))
    tol = max(1e-8, 1e-6 * radius)
    clusters = cluster_eigenvalues(values, tol)
    lam = np.array([values[c].mean() for c in clusters])
    alpha = np.array([a[c].sum() for c in clusters])
    beta = np.array([b[c].sum() for c in clusters])
    gamma = np.array([g[c].sum() for c in clusters])

    omega = area(db)
    itriv = int(np.argmin(np.abs(lam + 0.5)))
    triv_mass = abs(alpha[itriv]) + abs(beta[itriv]) + abs(gamma[itriv])
    if triv_mass > trivial_tol * omega:
        raise TrivialMassNonzero(f"mass {triv_mass:.3g} on the eigenvalue {lam[itriv]:.12g}")
    keep = np.ones(len(lam), dtype=bool)
    keep[itriv] = False
    keep &= (alpha + beta) >= drop_below * omega
    c2 = scale**2
    return SpectralData(
        lam=lam[keep],
        alpha=alpha[keep] / c2,
        beta=beta[keep] / c2,
        gamma=gamma[keep] / c2,
        area=omega / c2,
        trivial_lambda=float(lam[itriv]),
        cluster_tol=tol,
        scale=scale,
        n=db.n,
    )


def spectral_data(curve: BoundaryCurve, n: int = 256) -> SpectralData:
    """Normalize, discretize and build the spectral data of ``curve``."""
    normalized, transform = normalize(curve)
    db = discretize(normalized, n)
    K = assemble_K(db)
    S = assemble_S(db)
    Shalf, Sinvhalf = sqrt_S(S)
    A = assemble_A(K, Shalf, Sinvhalf)
    phi = dirichlet_density(K, db)
    return build_spectral_data(A, Shalf, Sinvhalf, phi, db, scale=transform.scale)


@dataclass(frozen=True)
class SmoothCoefficient:
    """One term of the pole sum: ``r_sq = r_n^2``, ``r_neg_sq = r_{-n}^2``."""

    lam: float
    r_sq: float
    r_neg_sq: float
    c: float
    c_defined: bool


def smooth_coefficients(sd: SpectralData, floor: float = 1e-12):
    """Coefficients ``(lambda_n, r_n^2, r_-n^2, c_n)`` of the pole sum.

    ``c_n`` is ``gamma / (r_n r_-n)``; it is reported as 0 and flagged
    undefined at ``lambda = 0`` (odd-function convention) and whenever
    ``r_n r_-n <= floor``.
    """
    out = []
    for i, lam in enumerate(sd.lam):
        r_sq = float(sd.alpha[i])
        r_neg_sq = sd.alpha_at(-lam)
        rr = np.sqrt(max(r_sq, 0.0) * max(r_neg_sq, 0.0))
        at_zero = abs(lam) <= sd.cluster_tol
        if at_zero or rr <= floor:
            out.append(SmoothCoefficient(float(lam), r_sq, r_neg_sq, 0.0, False))
            continue
        c = float(sd.gamma[i] / rr)
        if abs(c) > 1 + 1e-8:
            raise ValueError(f"|c_n| = {abs(c):.12g} > 1 at lambda = {lam:.12g}")
        out.append(SmoothCoefficient(float(lam), r_sq, r_neg_sq, c, True))
    return out


RECORD_VERSION = 1


def write_spectral_records(sd: SpectralData, path) -> None:
    """One line per cluster: ``lambda alpha beta gamma``."""
    with open(path, "w") as fh:
        fh.write(f"# spectral-data v{RECORD_VERSION}\n")
        fh.write(f"# area={sd.area!r} trivial_lambda={sd.trivial_lambda!r} "
                 f"cluster_tol={sd.cluster_tol!r} scale={sd.scale!r} n={sd.n}\n")
        fh.write("# lambda alpha beta gamma\n")
        for row in sd.rows():
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_spectral_records(path) -> SpectralData:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# spectral-data v"):
        raise ValueError("missing spectral-data header")
    version = int(lines[0].rsplit("v", 1)[1])
    if version != RECORD_VERSION:
        raise ValueError(f"unsupported spectral-data version {version}")
    meta = dict(item.split("=") for item in lines[1][1:].split())
    rows = np.array([[float(v) for v in ln.split()] for ln in lines[3:] if ln.strip()])
    rows = rows.reshape(-1, 4)
    return SpectralData(
        lam=rows[:, 0], alpha=rows[:, 1], beta=rows[:, 2], gamma=rows[:, 3],
        area=float(meta["area"]), trivial_lambda=float(meta["trivial_lambda"]),
        cluster_tol=float(meta["cluster_tol"]), scale=float(meta["scale"]),
        n=int(meta["n"]),
    )
