import logging

from dotenv import load_dotenv
from environs import Env

load_dotenv()
env = Env()

TEST_DATA_DIR = env.str("OUTSPACE_TEST_DATA_DIR", "test/data/v1")
LIPSCHITZ_CONSTANT = env.float("OUTSPACE_LIPSCHITZ_CONSTANT", 260.0)
PL_WORD_CAP = env.int("OUTSPACE_PL_WORD_CAP", 3)
PL_RADIUS_CAP = env.int("OUTSPACE_PL_RADIUS_CAP", 4)
PL_SEARCH_CAP = env.int("OUTSPACE_PL_SEARCH_CAP", 200_000)
PL_REPRESENTATIVES = env.int("OUTSPACE_PL_REPRESENTATIVES", None)  # unset: the whole projection
PL_PAIR_CAP = env.int("OUTSPACE_PL_PAIR_CAP", 50_000)
TIME_STEP = env.float("OUTSPACE_TIME_STEP", 0.05)
MAX_WORKERS = env.int("OUTSPACE_MAX_WORKERS", 4)
PLATEAU_CAP = env.int("OUTSPACE_PLATEAU_CAP", 8)  # equal-length forms explored per Whitehead plateau
LOG_LEVEL = env.log_level("OUTSPACE_LOG_LEVEL", logging.WARNING)

if LIPSCHITZ_CONSTANT < 1:
    raise ValueError("OUTSPACE_LIPSCHITZ_CONSTANT must be at least 1.")
if min(PL_WORD_CAP, PL_RADIUS_CAP, PL_SEARCH_CAP, PL_PAIR_CAP, MAX_WORKERS) < 1:
    raise ValueError("PL caps and worker count must be positive.")
if PL_REPRESENTATIVES is not None and PL_REPRESENTATIVES < 1:
    raise ValueError("OUTSPACE_PL_REPRESENTATIVES must be positive when set.")
if not 0 < TIME_STEP <= 1:
    raise ValueError("OUTSPACE_TIME_STEP must lie in (0, 1].")
