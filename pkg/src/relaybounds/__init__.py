"""Numerical bounds on the capacity of primitive relay channels.

The information-term kernels run from a compiled extension when it was built
and fall back to numpy otherwise; ``relaybounds.kernels.BACKEND`` says which.
"""
from .bounds import (
    BoundResult,
    CriticalRate,
    IdentityCheckError,
    RateGrid,
    ResolutionError,
    SweepRow,
    capacity_endpoints,
    caf_rate,
    critical_r0_lower_bound,
    cut_set_bound,
    new_upper_bound,
    sweep,
)
from .kernels import BACKEND
from .optimizer import (
    InfeasibleError,
    NumericalError,
    Optimum,
    SearchConfig,
    maximize_over_product,
    maximize_over_simplex,
    witsenhausen_G,
)
from .probability import (
    ChannelSpec,
    JointDistribution,
    ShapeError,
    ValidationError,
    binary_entropy,
    build_joint,
    conditional_mutual_information,
    entropy,
    marginalize,
    mutual_information,
    prob_vector,
    star,
    stochastic_matrix,
)

__version__ = "0.1.0"
