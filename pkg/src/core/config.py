# src/core/config.py
from dotenv import load_dotenv
import os

load_dotenv()

TOOL_VERSION = "0.3.1"

MAX_ORDER = int(os.environ.get("STEMRANK_MAX_ORDER", "512"))
MAX_CONDUCTOR = int(os.environ.get("STEMRANK_MAX_CONDUCTOR", "2048"))
DIXON_PRIME_BOUND = int(os.environ.get("STEMRANK_DIXON_PRIME_BOUND", "1000003"))
DIXON_ATTEMPTS = int(os.environ.get("STEMRANK_DIXON_ATTEMPTS", "8"))
MAX_STRATA = int(os.environ.get("STEMRANK_MAX_STRATA", str(2 ** 15)))
MAX_BOX_POINTS = int(os.environ.get("STEMRANK_MAX_BOX_POINTS", "2000000"))
CACHE_DIR = os.environ.get("STEMRANK_CACHE_DIR") or os.path.join(os.path.expanduser("~"), ".cache", "stemrank")
CACHE_ENABLED = os.environ.get("STEMRANK_CACHE", "1") != "0"
LOG_LEVEL = os.environ.get("STEMRANK_LOG_LEVEL", "WARNING")
