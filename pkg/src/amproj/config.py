"""Single table of numeric defaults shared by the library and the CLI.

Every tolerance or node count that a command-line flag can override is
defined here, nowhere else.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # a pivot below singular_pivot_factor * max|A| marks the factorization singular
    singular_pivot_factor: float = 1e-13

    # beta-quadrature defaults for the projected spectrum
    quadrature_points: int = 48
    min_quadrature_points: int = 8

    # a J component with n_J below norm_floor_factor * max_J n_J is declared absent
    norm_floor_factor: float = 1e-8

    # stability residual above which the particle-hole energy route gets a warning
    brillouin_warn: float = 1e-10

    # expected agreement of the two energy routes on a stable model
    route_delta: float = 1e-8

    # projector check suite
    projector_idempotence: float = 1e-9
    projector_annihilation: float = 1e-10
    integral_vs_series: float = 1e-6
    radial_identity_rel: float = 1e-10
    integral_imag_max: float = 1e-10
    radial_points: int = 40
    angular_points: int = 64


DEFAULTS = Tolerances()
