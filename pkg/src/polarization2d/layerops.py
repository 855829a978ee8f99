"""Nystrom matrices for the single and double layer operators.

Matrices act on nodal values. With ``W = diag(w)`` the discrete inner
product is ``<u, v> = u^T W v``; an operator is selfadjoint in this product
iff its *weighted* form ``W^(1/2) M W^(-1/2)`` is a symmetric matrix. All
symmetry statements, square roots and eigendecompositions are carried out
on the weighted form.

Kernels (fundamental solution ``-log|x - y| / (2 pi)``)::

    S: -log|x - y| / (2 pi)
    K: (x - y) . nu(y) / (2 pi |x - y|^2),  diagonal limit -kappa / (4 pi)

The logarithmic singularity of S is split off as ``log(4 sin^2((t - s)/2))``
and integrated with the exact trigonometric weights of Kress.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import AsymmetryTooLarge, NotNormalized, NotPositiveDefinite
from .geometry import DiscreteBoundary

__all__ = [
    "DenseOperator",
    "assemble_K",
    "assemble_S",
    "sqrt_S",
    "assemble_A",
    "plemelj_defect",
    "dump_operator",
    "load_operator",
]

KINDS = ("S", "K", "Kadj", "Shalf", "Sinvhalf", "A")


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """A dense boundary operator on the nodes of ``db``.

    ``matrix`` acts on nodal values; ``weighted`` is the similar matrix
    ``W^(1/2) matrix W^(-1/2)``.
    """

    matrix: np.ndarray
    db: DiscreteBoundary
    kind: str
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        m = np.ascontiguousarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_weighted(cls, weighted, db, kind, **info):
        sq = np.sqrt(db.w)
        return cls(weighted / sq[:, None] * sq[None, :], db, kind, dict(info))

    @property
    def n(self):
        return self.matrix.shape[0]

    @cached_property
    def weighted(self):
        sq = np.sqrt(self.db.w)
        out = sq[:, None] * self.matrix / sq[None, :]
        out.setflags(write=False)
        return out

    @cached_property
    def eigenvalues(self):
        """All eigenvalues, sorted by real part."""
        if self.kind in ("S", "Shalf", "Sinvhalf", "A"):
            ev = np.linalg.eigvalsh(0.5 * (self.weighted + self.weighted.T))
        else:
            ev = np.linalg.eigvals(self.matrix)
            ev = ev[np.argsort(ev.real)]
        ev.setflags(write=False)
        return ev

    @property
    def adjoint(self):
        """Adjoint in the weighted inner product: ``W^(-1) M^T W``."""
        w = self.db.w
        kind = {"K": "Kadj", "Kadj": "K"}.get(self.kind, self.kind)
        return DenseOperator(self.matrix.T * w[None, :] / w[:, None], self.db, kind)

    def __matmul__(self, other):
        return self.matrix @ (other.matrix if isinstance(other, DenseOperator) else other)


def assemble_K(db: DiscreteBoundary) -> DenseOperator:
    """Double layer operator; rows sum to -1/2 on any closed curve."""
    diff = db.x[:, None, :] - db.x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, 1.0)
    kern = np.einsum("ijk,jk->ij", diff, db.nu) / (2 * np.pi * r2)
    np.fill_diagonal(kern, -db.kappa / (4 * np.pi))
    return DenseOperator(kern * db.w[None, :], db, "K")


def kress_log_weights(n: int) -> np.ndarray:
    """Circulant weights ``R[i, j]`` for ``int log(4 sin^2((t_i - s)/2)) f(s) ds``."""
    k = np.arange(n)
    m = np.arange(1, n // 2)
    row = -(4 * np.pi / n) * (np.cos(np.outer(2 * np.pi * k / n, m)) / m).sum(axis=1)
    row -= (4 * np.pi / n**2) * np.cos(np.pi * k)
    idx = (k[:, None] - k[None, :]) % n
    return row[idx]


def assemble_S(db: DiscreteBoundary, check_normalized: bool = True) -> DenseOperator:
    """Single layer operator with Kress product quadrature for the log kernel.

    Raises
    ------
    NotNormalized
        If ``check_normalized`` and some node lies outside the unit disk;
        positivity of S is only guaranteed for domains inside it.
    """
    if check_normalized:
        rmax = float(np.max(np.linalg.norm(db.x, axis=1)))
        if rmax >= 1.0:
            raise NotNormalized(f"boundary node at distance {rmax:.4g} >= 1 from origin")
    n = db.n
    diff = db.x[:, None, :] - db.x[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    dt = db.t[:, None] - db.t[None, :]
    s2 = 4 * np.sin(dt / 2) ** 2
    np.fill_diagonal(r2, 1.0)
    np.fill_diagonal(s2, 1.0)
    smooth = -np.log(r2 / s2) / (4 * np.pi)
    np.fill_diagonal(smooth, -np.log(db.speed**2) / (4 * np.pi))
    R = kress_log_weights(n)
    mat = -R / (4 * np.pi) * db.speed[None, :] + smooth * db.w[None, :]
    return DenseOperator(mat, db, "S")


def sqrt_S(S: DenseOperator):
    """Symmetric square root of S and its inverse.

    Raises
    ------
    NotPositiveDefinite
        If the smallest eigenvalue is below ``1e-13`` times the largest.
    """
    sym = 0.5 * (S.weighted + S.weighted.T)
    ev, U = np.linalg.eigh(sym)
    if ev[0] <= 1e-13 * ev[-1]:
        raise NotPositiveDefinite(
            f"smallest eigenvalue {ev[0]:.3g} vs largest {ev[-1]:.3g}"
        )
    root = np.sqrt(ev)
    half = (U * root) @ U.T
    invhalf = (U / root) @ U.T
    half = 0.5 * (half + half.T)
    invhalf = 0.5 * (invhalf + invhalf.T)
    return (
        DenseOperator.from_weighted(half, S.db, "Shalf", min_eig=float(ev[0])),
        DenseOperator.from_weighted(invhalf, S.db, "Sinvhalf", min_eig=float(ev[0])),
    )


def assemble_A(K: DenseOperator, Shalf: DenseOperator, Sinvhalf: DenseOperator,
               max_defect: float = 1e-6) -> DenseOperator:
    """Symmetrized operator ``S^(-1/2) K S^(1/2)``.

    The relative asymmetry before forced symmetrization is kept in
    ``info["asymmetry"]``; it measures how well the discrete Plemelj
    identity ``KS = SK'`` holds.
    """
    if not (K.db is Shalf.db is Sinvhalf.db):
        raise ValueError("operators must share one discretization")
    A = Sinvhalf.weighted @ K.weighted @ Shalf.weighted
    defect = float(np.linalg.norm(A - A.T) / np.linalg.norm(A))
    if defect > max_defect:
        raise AsymmetryTooLarge(f"relative asymmetry {defect:.3g} exceeds {max_defect:g}")
    return DenseOperator.from_weighted(0.5 * (A + A.T), K.db, "A", asymmetry=defect)


def plemelj_defect(K: DenseOperator, S: DenseOperator) -> float:
    """Relative defect ``||KS - SK'|| / ||KS||`` in the weighted form."""
    KS = K.weighted @ S.weighted
    SKt = S.weighted @ K.weighted.T
    return float(np.linalg.norm(KS - SKt) / np.linalg.norm(KS))


# Binary dump: magic, format version, n, kind (8 bytes ASCII), then n*n
# little-endian float64 in row-major order.
_MAGIC = b"PT2DOP"
_VERSION = 1
_HEADER = struct.Struct("<6sHI8s")


def dump_operator(op: DenseOperator, path) -> None:
    """Write ``op.matrix`` (nodal form) to a versioned binary file."""
    header = _HEADER.pack(_MAGIC, _VERSION, op.n, op.kind.encode("ascii").ljust(8, b"\0"))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(op.matrix, dtype="<f8").tobytes())


def load_operator(path):
    """Read a dump written by :func:`dump_operator`; returns ``(matrix, kind)``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, n, kind = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise ValueError("not an operator dump")
    if version != _VERSION:
        raise ValueError(f"unsupported dump version {version}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if body.size != n * n:
        raise ValueError("truncated operator dump")
    return body.reshape(n, n).copy(), kind.rstrip(b"\0").decode("ascii")
