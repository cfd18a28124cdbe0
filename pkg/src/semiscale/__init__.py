"""Numerical Favard, Hölder and extrapolation scales for semigroups on C_b(R)."""

from .errors import (
    ChainConsistencyError, ConfigError, DomainError, EvaluationError, SemiscaleError,
    ShiftRequiredError, SpectralParameterError,
)
from .extrapolation import (
    ExtrapolatedVector, a_inverse, embed, ext_apply, favard0_norm, favard_ext, little_holder_ext,
)
from .funcspace import (
    CompactSet, Function, Grid, compact_seminorm, default_grid, holder_quotient, parse_function,
    sample, sup_norm, tabulate, wide_grid,
)
from .quadrature import QuadratureSpec
from .resolvent import (
    ResolventRequest, euler_approx, euler_errors, hy_bound, hy_probe, resolve, resolve_power,
)
from .scales import (
    FavardEstimate, ProbeSchedule, bicont_holder, classify_chain, favard_res, favard_sg,
    holder_exponent, interpolation_norm, little_holder,
)
from .semigroups import (
    SemigroupDescriptor, apply, generator_apply, heat, multiplication, orbit_integral,
    parse_semigroup, translation,
)

__version__ = "0.1.0"
