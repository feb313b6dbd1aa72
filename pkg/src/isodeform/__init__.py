"""Isotropy-preserving planar deformations: spiral construction, classification,
geometric invariance checks and Monte Carlo weak-isotropy experiments."""

__version__ = "0.1.0"

from .errors import (ArgumentError, CapabilityError, ClassificationError, ConfigurationError,
                     DegenerateInputError, DivergenceError, DomainError, EvaluationError,
                     FormatError, IsodeformError, ValidationError)
from .profiles import RadialProfile, from_table, identity, load_profile, parse_profile, polynomial, power_law, unit_pitch_spiral
from .polarmap import PolarMap, linear_map, read_polarmap, rotation, sampled_map, scaling, shear, write_polarmap
from .spiral import SpiralSpec, ValidationReport, build_spiral, theta_bar, theta_bar_array, validate_profile
from .analysis import classify_spiral, extract_fgh, fgh_residuals, hyperbolic_residuals, phi_decomposition
from .geometry import Rect, Segment, pushforward_area, pushforward_length, rotation_invariance_report
from .field import FieldSample, SpectralFieldSpec, sample_field
from .euler import BinaryGrid, euler_characteristic
from .experiment import area_length_fit, deformed_excursion, mean_euler, weak_isotropy_test
