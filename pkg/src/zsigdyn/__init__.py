"""Critical orbits of z^d + c over the rationals and their Zsigmondy sets."""

from .classifier import CaseTag, Classification, Consistency, classify, verify_against_computation
from .divisibility import ZsigmondyScanner, ZsigmondyVerdict, ord_profile, scan_zsigmondy_set, zsigmondy_set, zsigmondy_test
from .orbit import (
    FiniteOrbitError,
    InconclusiveError,
    LazyOrbit,
    Orbit,
    OrbitTerm,
    Parameter,
    ParameterError,
    critical_orbit,
    extend_orbit,
    make_parameter,
)

__version__ = "0.1.0"

__all__ = [
    "CaseTag",
    "Classification",
    "Consistency",
    "FiniteOrbitError",
    "InconclusiveError",
    "LazyOrbit",
    "Orbit",
    "OrbitTerm",
    "Parameter",
    "ParameterError",
    "ZsigmondyScanner",
    "ZsigmondyVerdict",
    "classify",
    "critical_orbit",
    "extend_orbit",
    "make_parameter",
    "ord_profile",
    "scan_zsigmondy_set",
    "verify_against_computation",
    "zsigmondy_set",
    "zsigmondy_test",
]
