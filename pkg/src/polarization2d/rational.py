"""Pole/residue models of sampled polarization tensors.

The three independent entries ``(M11, M12, M22)`` are fitted jointly by
vector fitting with a shared set of real poles and no polynomial part
(the tensor vanishes at infinity). Residues of both diagonal entries are
kept nonnegative and their sums equal, as the underlying measures demand.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import FitDiverged, InsufficientSamples

__all__ = [
    "RationalModel",
    "TwoPoleCertificate",
    "fit_rational",
    "detect_two_pole",
    "two_pole_tensor",
]


@dataclass(frozen=True, eq=False)
class RationalModel:
    """``M(mu) = sum_p R_p / (mu - poles[p])`` with real symmetric ``R_p``."""

    poles: np.ndarray
    residues: np.ndarray  # shape (p, 2, 2)
    fit_residual: float
    projection: float = 0.0

    def __call__(self, mu):
        mu = np.asarray(mu, dtype=complex)
        r = 1.0 / (mu[..., None] - self.poles)
        return np.einsum("...p,pkl->...kl", r, self.residues)

    @property
    def n_poles(self):
        return len(self.poles)

    def to_dict(self):
        return {
            "poles": self.poles.tolist(),
            "residues": self.residues.tolist(),
            "fit_residual": self.fit_residual,
            "projection": self.projection,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(np.asarray(d["poles"], float), np.asarray(d["residues"], float).reshape(-1, 2, 2),
                   float(d["fit_residual"]), float(d.get("projection", 0.0)))


_EDGE = 0.5 - 1e-6


def _as_samples(samples):
    mus = np.array([complex(mu) for mu, _ in samples])
    ms = np.array([np.asarray(m, dtype=complex).reshape(2, 2) for _, m in samples])
    return mus, ms


def _ri(z):
    """Stack real and imaginary parts row-wise."""
    return np.concatenate([z.real, z.imag], axis=0)


def _residues(mus, F, poles):
    """Least-squares residues for fixed poles; F columns are M11, M12, M22."""
    p = len(poles)
    Phi = 1.0 / (mus[:, None] - poles[None, :])
    s = len(mus)
    # diagonal entries: nonnegative, equal sums (penalty row)
    scale = np.abs(F[:, [0, 2]]).max()
    big = 1e6
    rows = np.zeros((2 * s, 2 * p), dtype=complex)
    rows[:s, :p] = Phi
    rows[s:, p:] = Phi
    rhs = np.concatenate([F[:, 0], F[:, 2]])
    G = _ri(rows)
    y = _ri(rhs)
    penalty = np.concatenate([np.ones(p), -np.ones(p)]) * big
    G = np.vstack([G, penalty[None, :]]) / scale
    y = np.concatenate([y, [0.0]]) / scale
    diag, _ = nnls(G, y, maxiter=50 * G.shape[1])
    r11, r22 = diag[:p], diag[p:]
    r12, *_ = np.linalg.lstsq(_ri(Phi), _ri(F[:, 1]), rcond=None)
    R = np.empty((p, 2, 2))
    R[:, 0, 0] = r11
    R[:, 1, 1] = r22
    R[:, 0, 1] = R[:, 1, 0] = r12
    return R


def _residual(mus, ms, poles, R):
    fit = RationalModel(poles, R, 0.0)(mus)
    err = np.abs(fit - ms).reshape(len(mus), -1).max(axis=1)
    ref = np.abs(ms).reshape(len(mus), -1).max(axis=1)
    return float(np.max(err / ref))


def _relocate(mus, F, poles, iterations, tol=1e-14):
    """Vector-fitting pole relocation with real poles."""
    s, e = F.shape
    # one common scale: per-entry scaling would amplify a vanishing M12
    weights = np.full(e, 1.0 / max(np.abs(F).max(), 1e-300))
    proj = 0.0
    for _ in range(iterations):
        p = len(poles)
        Phi = 1.0 / (mus[:, None] - poles[None, :])
        blocks = []
        rhs = []
        for j in range(e):
            row = np.zeros((s, e * p + p), dtype=complex)
            row[:, j * p:(j + 1) * p] = Phi * weights[j]
            row[:, e * p:] = -(F[:, j] * weights[j])[:, None] * Phi
            blocks.append(row)
            rhs.append(F[:, j] * weights[j])
        G = _ri(np.vstack(blocks))
        y = _ri(np.concatenate(rhs))
        x, *_ = np.linalg.lstsq(G, y, rcond=None)
        d = x[e * p:]
        zeros = np.linalg.eigvals(np.diag(poles) - np.outer(np.ones(p), d))
        proj = float(np.max(np.abs(zeros.imag))) if p else 0.0
        # keep iterates inside the admissible interval; later filtered
        new = np.sort(np.clip(zeros.real, -_EDGE, _EDGE))
        # coincident poles after projection carry no extra information
        keep = np.concatenate([[True], np.diff(new) > 1e-10]) if p else np.array([], bool)
        new = new[keep]
        if not np.all(np.isfinite(new)):
            raise FitDiverged("non-finite poles during relocation")
        moved = np.inf if len(new) != len(poles) else float(np.max(np.abs(new - poles)))
        poles = new
        if moved < tol:
            break
    return poles, proj


def _fit_fixed_order(mus, ms, k, start, iterations):
    F = np.column_stack([ms[:, 0, 0], ms[:, 0, 1], ms[:, 1, 1]])
    poles, proj = _relocate(mus, F, np.asarray(start, float), iterations)
    inside = np.abs(poles) < _EDGE
    poles = poles[inside]
    if len(poles) == 0:
        return None
    R = _residues(mus, F, poles)
    res = _residual(mus, ms, poles, R) + proj
    return RationalModel(poles, R, res, proj)


def fit_rational(samples, max_poles: int, iterations: int = 60,
                 occam: float = 10.0, floor: float = 1e-13) -> RationalModel:
    """Fit a pole/residue model with at most ``max_poles`` real poles in (-1/2, 1/2).

    Every order ``k = 1..max_poles`` is fitted from a few deterministic
    starting pole sets; the smallest order whose residual is within a factor
    ``occam`` of the best one (or below ``floor``) is returned. This makes
    the reported residual nonincreasing in ``max_poles``.

    Parameters
    ----------
    samples
        Sequence of ``(mu, 2x2 matrix)`` pairs.
    """
    if max_poles < 1:
        raise ValueError("max_poles must be positive")
    if len(samples) < 2 * max_poles + 2:
        raise InsufficientSamples(
            f"{len(samples)} samples cannot identify {max_poles} poles "
            f"(need >= {2 * max_poles + 2})"
        )
    mus, ms = _as_samples(samples)
    if len(np.unique(np.round(mus, 14))) != len(mus):
        raise InsufficientSamples("sample contrasts must be pairwise distinct")
    real_mu = np.abs(mus.imag) < 1e-14
    if np.any(real_mu & (np.abs(mus.real) < 0.5)):
        raise ValueError("real sample contrasts must satisfy |mu| >= 1/2")

    per_order = []
    prev = None
    for k in range(1, max_poles + 1):
        starts = [np.linspace(-0.45, 0.45, k) if k > 1 else np.array([0.0]),
                  0.45 * np.cos(np.pi * (np.arange(k) + 0.5) / k)[::-1]]
        if prev is not None:
            extra = [p for p in (0.0, 0.3, -0.3) if np.min(np.abs(prev.poles - p)) > 1e-3]
            starts.append(np.sort(np.append(prev.poles, extra[0] if extra else 0.49)))
        best = None
        for start in starts:
            try:
                model = _fit_fixed_order(mus, ms, k, start, iterations)
            except (FitDiverged, np.linalg.LinAlgError):
                continue
            if model is not None and (best is None or model.fit_residual < best.fit_residual):
                best = model
        per_order.append(best)
        if best is not None:
            prev = best
    fits = [m for m in per_order if m is not None]
    if not fits:
        raise FitDiverged("no admissible rational model found")
    best_res = min(m.fit_residual for m in fits)
    threshold = max(occam * best_res, floor)
    for m in per_order:
        if m is not None and m.fit_residual <= threshold:
            return m
    raise FitDiverged("model selection failed")  # pragma: no cover


@dataclass(frozen=True)
class TwoPoleCertificate:
    """Residue data of a two-pole tensor in the frame rotated by ``frame_angle``.

    In that frame the residue at ``+lam`` is ``[[r+^2, r+r-], [r+r-, r-^2]]``
    and at ``-lam`` it is ``[[r-^2, -r+r-], [-r+r-, r+^2]]`` with
    ``r+, r- >= 0``.
    """

    lam: float
    r_plus_sq: float
    r_minus_sq: float
    constraint_defect: float
    frame_angle: float = 0.0
    angle_undefined: bool = False


def two_pole_tensor(mu, lam, r_plus_sq, r_minus_sq, frame_angle=0.0):
    """Evaluate the two-pole form (rotated by ``frame_angle``)."""
    mu = complex(mu)
    rp, rm = np.sqrt(r_plus_sq), np.sqrt(r_minus_sq)
    a = 1.0 / (mu - lam)
    b = 1.0 / (mu + lam)
    m = np.array([[rp**2 * a + rm**2 * b, rp * rm * (a - b)],
                  [rp * rm * (a - b), rm**2 * a + rp**2 * b]])
    c, s = np.cos(frame_angle), np.sin(frame_angle)
    Q = np.array([[c, -s], [s, c]])
    return Q @ m @ Q.T


def detect_two_pole(model: RationalModel, tol: float = 1e-6):
    """Certificate that ``model`` has the two-pole ellipse structure, else None.

    Conditions, all relative to the total mass ``tr R(+lam)``:
    fit residual <= tol; one pole at 0 with isotropic residue, or two poles
    at ``+-lam`` whose residues are rank one, have equal traces and sum to a
    multiple of the identity.
    """
    if model.fit_residual > tol or model.n_poles > 2:
        return None
    poles, R = model.poles, model.residues
    if model.n_poles == 1:
        lam = float(poles[0])
        R0 = R[0]
        mass = float(np.trace(R0)) / 2
        if abs(lam) > tol or mass <= 0:
            return None
        defect = max(abs(R0[0, 0] - R0[1, 1]), 2 * abs(R0[0, 1])) / (2 * mass)
        if defect > tol:
            return None
        # R0 = (r+^2 + r-^2) I; report all mass on r+
        return TwoPoleCertificate(0.0, mass, 0.0, float(defect), 0.0, True)

    lo, hi = np.argsort(poles)
    lam = 0.5 * (poles[hi] - poles[lo])
    if abs(poles[hi] + poles[lo]) > tol or lam <= 0:
        return None
    Rp, Rm = R[hi], R[lo]
    mass = 0.5 * (np.trace(Rp) + np.trace(Rm))
    if mass <= 0:
        return None
    det_p = abs(Rp[0, 1] ** 2 - Rp[0, 0] * Rp[1, 1])
    det_m = abs(Rm[0, 1] ** 2 - Rm[0, 0] * Rm[1, 1])
    total = Rp + Rm
    iso = max(abs(total[0, 0] - total[1, 1]), 2 * abs(total[0, 1]))
    defect = float(max(det_p / mass**2, det_m / mass**2, iso / mass,
                       abs(np.trace(Rp) - np.trace(Rm)) / mass))
    if defect > tol:
        return None
    D = Rp - Rm
    phi_v = 0.5 * np.arctan2(2 * D[0, 1], D[0, 0] - D[1, 1])
    if phi_v >= 0:
        frame, local = 0.0, phi_v
    else:
        frame, local = np.pi / 2, phi_v + np.pi / 2
    local = min(max(local, 0.0), np.pi / 2)
    return TwoPoleCertificate(
        lam=float(lam),
        r_plus_sq=float(mass * np.cos(local) ** 2),
        r_minus_sq=float(mass * np.sin(local) ** 2),
        constraint_defect=defect,
        frame_angle=float(frame),
        angle_undefined=False,
    )
