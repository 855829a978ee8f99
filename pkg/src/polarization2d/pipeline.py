"""Cached per-domain state shared by the CLI and the tests."""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .geometry import BoundaryCurve, area, discretize, normalize
from .layerops import assemble_A, assemble_K, assemble_S, sqrt_S
from .poltensor import GUARD, WARN_DISTANCE, polarization_tensor
from .spectral import build_spectral_data, dirichlet_density, eig_A

__all__ = ["Problem"]


class Problem:
    """A curve at one resolution, with lazily built operators.

    ``db`` and ``K`` live on the original curve (K's spectrum does not
    change under rescaling); the spectral data is built on the normalized
    copy and mapped back.
    """

    def __init__(self, curve: BoundaryCurve, n: int = 256):
        self.curve = curve
        self.n = int(n)

    @cached_property
    def db(self):
        return discretize(self.curve, self.n)

    @cached_property
    def K(self):
        return assemble_K(self.db)

    @property
    def area(self):
        return area(self.db)

    @cached_property
    def _normalized(self):
        curve, transform = normalize(self.curve)
        db = discretize(curve, self.n)
        K = assemble_K(db)
        S = assemble_S(db)
        Shalf, Sinvhalf = sqrt_S(S)
        A = assemble_A(K, Shalf, Sinvhalf)
        return {"db": db, "K": K, "S": S, "Shalf": Shalf, "Sinvhalf": Sinvhalf,
                "A": A, "transform": transform}

    @cached_property
    def eig(self):
        return eig_A(self._normalized["A"])

    @property
    def eigenvalues(self):
        """Fredholm eigenvalues (ascending) from the symmetrized operator."""
        return self.eig[0]

    @cached_property
    def spectral(self):
        nz = self._normalized
        phi = dirichlet_density(nz["K"], nz["db"])
        return build_spectral_data(nz["A"], nz["Shalf"], nz["Sinvhalf"], phi, nz["db"],
                                   scale=nz["transform"].scale, eig=self.eig)

    def tensor(self, mu, method="auto", guard=GUARD, warn_distance=WARN_DISTANCE):
        sd = self.spectral if method == "spectral" else None
        return polarization_tensor(self.db, self.K, mu, method=method, sd=sd,
                                   guard=guard, warn_distance=warn_distance)

    def tensors(self, mus, **kw):
        return [self.tensor(mu, **kw) for mu in np.asarray(mus).ravel()]
