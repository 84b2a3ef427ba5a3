"""Exact elliptic travelling waves of quartic scalar field equations."""

from .analysis import (
    FourierSeries,
    SeriesKind,
    SpectrumLine,
    fourier_series,
    mass_spectrum,
    partial_sum,
    phase_period,
    residual,
    residual_max,
)
from .elliptic import (
    JacobiTriple,
    complete_k,
    complete_k_complement,
    jacobi,
    jacobi_derivatives,
    nome,
)
from .quantum import (
    GreenSpectrum,
    GreenTimePart,
    green_derivative_identity,
    green_spectrum,
    green_time_part,
    greens_equation_residual,
    jump_slope,
    make_green_time_part,
    zero_mode_residual,
)
from .simulator import (
    DivergenceError,
    GridSpec,
    GridState,
    Physics,
    RunResult,
    energy,
    energy_drift,
    measure_frequency,
    run,
    seed_from_spec,
    step,
)
from .solutions import (
    Family,
    Momentum,
    Sign,
    SolutionSpec,
    corrupt,
    evaluate,
    from_dict,
    make_massive,
    make_massless,
    make_ssb,
    profile,
    renormalized_mass,
    rest_energy,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
