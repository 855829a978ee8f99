"""Polarization tensors of planar inclusions and their spectral structure.

The package discretizes the single and double layer operators of a smooth
closed curve, builds the spectral measures of the polarization tensor
``M(mu)``, fits pole/residue models to sampled tensors, recovers ellipses
from two-pole data and audits the Hashin-Shtrikman bounds.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import (BUILTIN_DOMAINS, BoundaryCurve, DiscreteBoundary, Ellipse,  # noqa: F401
                       FourierCurve, Kite, NormalizationTransform, Star, area,
                       builtin_curve, centroid, discretize, normalize)
from .layerops import (DenseOperator, assemble_A, assemble_K, assemble_S,  # noqa: F401
                       plemelj_defect, sqrt_S)
from .spectral import SpectralData, smooth_coefficients, spectral_data  # noqa: F401
from .poltensor import (PolTensor, pol_direct, pol_dual, pol_spectral,  # noqa: F401
                        polarization_tensor, transform_tensor)
from .rational import (RationalModel, TwoPoleCertificate, detect_two_pole,  # noqa: F401
                       fit_rational)
from .shape import EllipseParams, ellipse_distance, equivalent_ellipse, recover_ellipse  # noqa: F401
from .analysis import BoundsReport, hs_check, trace_asymptotics  # noqa: F401
from .pipeline import Problem  # noqa: F401
