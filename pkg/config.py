# config.py
import os
from dotenv import load_dotenv

# Load overrides from .env
load_dotenv()

TOOL_VERSION = "0.1.0"
REPORT_VERSION = 1

# Absolute tolerance for equalities between matrices
TOLERANCE = float(os.environ.get("INDEXLAB_TOL", "1e-10"))
# Singular values below RANK_RTOL * largest are treated as zero
RANK_RTOL = float(os.environ.get("INDEXLAB_RANK_RTOL", "1e-8"))

SEED = int(os.environ.get("INDEXLAB_SEED", "0"))

PP_SAMPLES = int(os.environ.get("INDEXLAB_PP_SAMPLES", "10000"))
PP_REFINE_STEPS = int(os.environ.get("INDEXLAB_PP_REFINE_STEPS", "200"))
MIN_INDEX_RESTARTS = int(os.environ.get("INDEXLAB_MIN_INDEX_RESTARTS", "10"))

MAX_TENSOR_GNS_DIM = int(os.environ.get("INDEXLAB_MAX_TENSOR_GNS_DIM", "4096"))
# Building A1 of a tensored inclusion as a subspace is only attempted up to this GNS dimension
MAX_BASIC_CHECK_DIM = int(os.environ.get("INDEXLAB_MAX_BASIC_CHECK_DIM", "256"))

LOG_PATH = os.environ.get("INDEXLAB_LOG_PATH", "data/runs.csv")
