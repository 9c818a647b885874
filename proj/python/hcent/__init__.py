"""Block entanglement in the vacuum of a periodic harmonic chain."""

from ._hcent import (
    BlockPair,
    ChainSpec,
    ConfigError,
    CorrelationKernel,
    DomainError,
    FitError,
    InvalidSpectrum,
    MeasureRecord,
    NotPositiveDefinite,
    ResourceError,
    __version__,
    build_kernel,
    coupling_for_xi,
    critical_preset,
    detect_saturation,
    dispersion,
    entropy,
    fit,
    log_negativity,
    loglog_slope,
    measure,
    measure_pair,
    mutual_information,
    renyi_half_entropy,
    run_sweep,
    self_check,
    symplectic_spectrum,
    xi,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
