import os
from dotenv import load_dotenv


load_dotenv()


LOG_DIR = os.getenv("RIS_KIT_LOG_DIR", "logs")
LOG_LEVEL = os.getenv("RIS_KIT_LOG_LEVEL", "INFO")

DEFAULT_TRIAL_BLOCK = 4096

DEFAULT_RATE_TRIALS = 10_000
DEFAULT_MOMENT_TRIALS = 200_000
DEFAULT_PHASE_DRAWS = 200

# GA budget inside sweeps is SWEEP_GENERATION_FACTOR * N generations
SWEEP_GENERATION_FACTOR = 20

Z_SCORE_LIMIT = 4.0


def get_worker_count() -> int:
    """Worker cap from RIS_KIT_THREADS, read at call time."""
    raw = os.getenv("RIS_KIT_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def get_trial_block() -> int:
    raw = os.getenv("RIS_KIT_TRIAL_BLOCK")
    if not raw:
        return DEFAULT_TRIAL_BLOCK
    return max(1, int(raw))
