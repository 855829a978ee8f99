"""Exception hierarchy.

Every numerical failure raised by the package derives from
:class:`PolarizationError`; the CLI maps these onto exit code 3 and names
the concrete class in its message.
"""


class PolarizationError(Exception):
    """Base class for all package errors."""


class ConfigError(PolarizationError):
    """Malformed domain or run configuration."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


# geometry
class NonRegularCurve(PolarizationError):
    pass


class SelfIntersection(PolarizationError):
    pass


# layer operators
class NotNormalized(PolarizationError):
    pass


class NotPositiveDefinite(PolarizationError):
    pass


class AsymmetryTooLarge(PolarizationError):
    pass


# spectral
class EigFailure(PolarizationError):
    pass


class SolveFailure(PolarizationError):
    pass


class TrivialMassNonzero(PolarizationError):
    pass


# polarization tensor
class ContrastNearSpectrum(PolarizationError):
    """The contrast lies within the guard distance of an eigenvalue."""

    def __init__(self, eigenvalue, mu, distance):
        self.eigenvalue = eigenvalue
        self.mu = mu
        self.distance = distance
        super().__init__(
            f"contrast mu={mu} is {distance:.3g} away from eigenvalue {eigenvalue}"
        )


class NotOrthogonal(PolarizationError):
    pass


# rational fitting
class InsufficientSamples(PolarizationError):
    pass


class FitDiverged(PolarizationError):
    pass


# shape recovery
class DegenerateCertificate(PolarizationError):
    pass


class NoEquivalentEllipse(PolarizationError):
    pass


# bounds
class SingularTensor(PolarizationError):
    pass


# oracle
class NoConvergence(PolarizationError):
    pass
