"""
Default settings for the excursion gap toolkit.

The command line reads these directly. The Tethys app exposes the same values
as custom settings so the portal and the command line agree on defaults.
"""
import os


# -------------------- #
#   NUMERIC DEFAULTS   #
# -------------------- #

DEFAULT_EPSILON = 1e-9
DEFAULT_T_MAX = 10 ** 6
DEFAULT_SEED = 7
DEFAULT_COVERAGE_TOL = 1e-12
DEFAULT_FD_STEP = 1e-5
DEFAULT_NORM = 2
BOUND_TOLERANCE = 1e-9

# Probabilities read from JSON are accepted within this tolerance, then renormalized.
LOAD_TOLERANCE = 1e-9
STOCHASTIC_TOLERANCE = 1e-12

CSV_FLOAT_FORMAT = "%.17g"


# ------------------------- #
#   ENVIRONMENT VARIABLES   #
# ------------------------- #

OUTPUT_DIR_ENV = "EXCURSION_GAP_OUTPUT_DIR"
STORE_ENV = "EXCURSION_GAP_STORE"


def get_output_directory():
    """
    Gets the default output directory.

    Uses EXCURSION_GAP_OUTPUT_DIR when set, otherwise the current working directory.
    """

    return os.environ.get(OUTPUT_DIR_ENV) or os.getcwd()


def get_store_url():
    """
    Gets the default results store URL, or None when runs should not be recorded.
    """

    return os.environ.get(STORE_ENV) or None
