"""Lubrication drag of a cusp-shaped solid approaching a wall."""

from .bmo import GridFunction, bmo_seminorm, catalog_function
from .drag import DragTable, drag_coefficient, drag_exponent, collision_regime
from .exceptions import (CrossCheckError, DegenerateInputError, DomainError,
                         NonFiniteWarning, QuadratureError, StepUnderflowError)
from .fall import FallParams, Outcome, PowerLawDrag, simulate_fall
from .field import field_sample, pressure, velocity, velocity_gradient
from .geometry import RoughProfile, gamma, lemma10_classify, lemma10_integral
from .norms import prop8_suite
from .powerlaw import PowerLawRegressor, fit_power_law

__version__ = "0.1.0"
