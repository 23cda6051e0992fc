"""Construction, simulation, checking and benchmarking of QDI dual-rail adders."""

from .adders import STANDARD_APPROX_SIZES, AdderConfig, build, build_adder, build_stage, standard_configs
from .approx import ErrorStats, approx_add, error_stats
from .bench import MetricsRow, Report, area_of, power_proxy, table_report
from .cells import DEFAULT_LIBRARY, CellKind, CellSpec, Library, cell_spec, eval_cell
from .check import (Violation, ViolationKind, check_all, check_legality, check_monotonicity,
                    detect_orphans, verify_early_reset)
from .dualize import dualize
from .errors import (CheckPreconditionError, ConfigError, DeadlockError, NetlistParseError,
                     NetlistValidationError, ProtocolViolation, QDIError, SimulationError)
from .netlist import Netlist, NetlistBuilder, deserialize, serialize, validate
from .railcode import Codeword, Protocol, RailPair, classify_pair, decode_bus, encode_word
from .sim import (Simulator, StageEnv, Trace, TransactionTiming, run_sequence,
                  simulate_transaction)

__version__ = "0.1.0"
