"""Three-sphere low-Reynolds-number swimmer in the long-arm regime."""
from .control import (
    AsymptoticCoefficients, ControlExpansion, control_matrix_exact,
    control_matrix_exact_full_inversion, expand, extracted_coefficients, series_coefficients,
)
from .dynamics import Trajectory, integrate_exact, integrate_leading_order, net_displacement
from .energetics import DissipationForm, extract_G0, gram_matrix, loop_dissipation
from .errors import AdmissibilityError, ConfigError, NumericalError
from .kinematics import Pose, SwimmerGeometry
from .strokes import EllipticStroke, omega_vector, optimal_stroke, realized_displacement

__version__ = "0.1.0"
