"""Numerical verification of anisotropic Hardy-type inequalities.

Gauges and their polars, Wulff-ball quadrature, a corpus of test fields,
evaluators for the Hardy functionals, sharpness sweeps, distance-function
geometry and the change-of-variables transformations, tied together by a
configuration-driven command-line runner.
"""

from .config import ExperimentConfig, default_config, load_config
from .distance import DomainShape, domain_from_record
from .errors import AnisoHardyError
from .fields import LiftedField, RadialProfile, ScalarField, corpus_field, lift_radial
from .gauge import Gauge, PolarGauge, make_gauge, polar
from .hardy import (HardyFunctional, HardyResult, critical_quotient, evaluate, geometric_quotient,
                    subcritical_quotient, uncertainty_product, weighted_quotient)
from .quadrature import Resolution
from .report import CheckRow, ExperimentReport
from .sharpness import SharpnessProbe, sweep
from .suites import run_all, run_suite

__version__ = "0.1.0"

__all__ = [
    "AnisoHardyError", "CheckRow", "DomainShape", "ExperimentConfig", "ExperimentReport",
    "Gauge", "HardyFunctional", "HardyResult", "LiftedField", "PolarGauge", "RadialProfile",
    "Resolution", "ScalarField", "SharpnessProbe", "corpus_field", "critical_quotient",
    "default_config", "domain_from_record", "evaluate", "geometric_quotient", "lift_radial",
    "load_config", "make_gauge", "polar", "run_all", "run_suite", "subcritical_quotient",
    "sweep", "uncertainty_product", "weighted_quotient",
]
