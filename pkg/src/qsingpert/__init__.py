"""Physical realizability and singular-perturbation reduction of passive linear quantum systems."""
from .adiabatic import (
    EliminationResult, SpecialClassParams, Theorem4Report, build_special, eliminate,
    special_unscaled, verify_theorem4,
)
from .catalog import CatalogEntry, cavity_example, get_entry, pathological_example
from .errors import (
    DimensionError, EliminationUndefinedError, FileFormatError, InconsistentWitnessError,
    InvalidParameterError, NumericError, PoleProximityError, QSysError, ReductionUndefinedError,
    SingularOperatorError,
)
from .linalg import (
    DEFAULT_TOL, Definiteness, Tolerances, eig, numerical_rank, posdef_check, sylvester_solve,
)
from .qsys import (
    FrequencyGrid, LBRVerdict, MinimalityVerdict, PhysicalRealization, QuantumLinearSystem,
    RealizabilityReport, find_commutation_matrix, frequency_response, lossless_bounded_real_check,
    minimality_check, realize_from_physical, recover_physical, unitarity_defect,
)
from .singular import (
    ConvergenceReport, PartitionedSystem, assemble_full, convergence_study, reduce_slow,
)

__version__ = "0.1.0"
