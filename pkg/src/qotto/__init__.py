"""Quantum Otto cycles for a particle in 1D confining potentials."""

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "AuditError", "ConfigError", "CycleResult", "DomainError",
    "DomainTooSmallError", "Harmonic", "IonTrap", "Mode", "QottoError", "SolverError",
    "Spectrum", "SquareWell", "SquareWellDelta", "SquareWellFiniteBarrier", "TruncationError",
    "UnitSystem", "carnot_audit", "classical_limit_series", "classical_mean_energy",
    "classical_otto", "classify_mode", "evaluate", "extrapolate_classical", "heat_capacity",
    "homogeneous_work_oracle", "mean_energy", "potential_cycle", "run_otto", "scale",
    "scaled_cycle", "solve", "solve_delta_well", "solve_dvr", "solve_harmonic",
    "solve_square_well", "thermalize", "tls_summary", "verify_scaling_relation",
]

from .cycle import (  # noqa: E402
    CycleResult,
    Mode,
    carnot_audit,
    classical_otto,
    classify_mode,
    homogeneous_work_oracle,
    run_otto,
    tls_summary,
)
from .errors import (  # noqa: E402
    AccuracyError,
    AuditError,
    ConfigError,
    DomainError,
    DomainTooSmallError,
    QottoError,
    SolverError,
    TruncationError,
)
from .limits import (  # noqa: E402
    classical_limit_series,
    extrapolate_classical,
    potential_cycle,
    scaled_cycle,
    verify_scaling_relation,
)
from .potentials import (  # noqa: E402
    Harmonic,
    IonTrap,
    SquareWell,
    SquareWellDelta,
    SquareWellFiniteBarrier,
    UnitSystem,
    evaluate,
    scale,
)
from .spectrum import (  # noqa: E402
    Spectrum,
    solve,
    solve_delta_well,
    solve_dvr,
    solve_harmonic,
    solve_square_well,
)
from .thermo import classical_mean_energy, heat_capacity, mean_energy, thermalize  # noqa: E402
