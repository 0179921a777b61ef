import os
from dotenv import load_dotenv

load_dotenv()

LOG_LEVEL = os.getenv("RESONANCE_LOG_LEVEL", "INFO")
OUTPUT_DIR = os.getenv("RESONANCE_OUTPUT_DIR", ".")

# Scan defaults, overridden by scenario documents and CLI flags
DEFAULT_K_MIN = float(os.getenv("RESONANCE_DEFAULT_K_MIN", "1e-3"))
DEFAULT_K_MAX = float(os.getenv("RESONANCE_DEFAULT_K_MAX", "10.0"))
DEFAULT_SAMPLES = int(os.getenv("RESONANCE_DEFAULT_SAMPLES", "2000"))

# Upper bound on bracketing grids inside the root solvers
MAX_GRID_POINTS = int(os.getenv("RESONANCE_MAX_GRID_POINTS", "2000000"))

TOOL_VERSION = "1.0.0"
