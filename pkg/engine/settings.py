import json
import os

from dotenv import load_dotenv

# --- Load environment variables ---
ENV_PATH = os.path.join(os.path.dirname(__file__), '..', '.env')
load_dotenv(ENV_PATH)

# --- Load config once ---
CONFIG_PATH = os.path.join(os.path.dirname(__file__), '..', 'config.json')
with open(CONFIG_PATH, 'r', encoding='utf-8') as f:
    config = json.load(f)

LOG_LEVELS = {"quiet": 0, "info": 1, "debug": 2}


def get_setting(key, default=None):
    """
    Read a value from config.json, falling back to `default`.
    """
    return config.get(key, default)


def log_level() -> int:
    """
    Verbosity from TDPKIT_LOG (quiet | info | debug), else config's log_level.
    Read on every call so tests and the CLI can change it at runtime.
    """
    name = os.getenv("TDPKIT_LOG") or config.get("log_level", "info")
    name = name.strip().lower()
    if name not in LOG_LEVELS:
        raise ValueError(f"Unsupported TDPKIT_LOG level: {name} (expected one of {sorted(LOG_LEVELS)})")
    return LOG_LEVELS[name]
