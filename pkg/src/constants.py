from enum import Enum

PACKAGE_NAME = "junction-sim"
SCHEMA_VERSION = 1

BASIS_ORDERING = "m-descending, species-1 major"
CSV_FLOAT_FORMAT = "%.17g"

THREADS_ENV = "JUNCTION_THREADS"
OUTPUT_ENV = "JUNCTION_OUTPUT"
LOG_LEVEL_ENV = "JUNCTION_LOG_LEVEL"

DEFAULT_OUTPUT_ROOT = "results"


class ExitCode(int, Enum):
    OK = 0
    CRITERIA_FAILED = 1
    RUN_FAILED = 1
    CONFIG_ERROR = 2
