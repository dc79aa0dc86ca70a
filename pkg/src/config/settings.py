"""
Configuration settings for the PAPC power-allocation simulator
Loads settings from environment variables with sensible defaults
"""

import os
from typing import List
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

def get_bool_env(key: str, default: bool = False) -> bool:
    """Get boolean value from environment variable"""
    value = os.getenv(key, str(default)).lower()
    return value in ('true', '1', 'yes', 'on')

def get_int_env(key: str, default: int) -> int:
    """Get integer value from environment variable"""
    try:
        return int(os.getenv(key, str(default)))
    except ValueError:
        return default

def get_float_env(key: str, default: float) -> float:
    """Get float value from environment variable"""
    try:
        return float(os.getenv(key, str(default)))
    except ValueError:
        return default

def get_list_env(key: str, default: List[str]) -> List[str]:
    """Get list value from environment variable (comma-separated)"""
    value = os.getenv(key)
    if value:
        return [item.strip() for item in value.split(',')]
    return default

# Execution
PAPC_WORKERS = get_int_env('PAPC_WORKERS', 1)
DEFAULT_SEED = get_int_env('DEFAULT_SEED', 42)
DEFAULT_TRIALS = get_int_env('DEFAULT_TRIALS', 200)
DEFAULT_METHODS = get_list_env('DEFAULT_METHODS', ['all'])

# Barrier / Newton solver settings
MPU_MAX_ITERATIONS = get_int_env('MPU_MAX_ITERATIONS', 50)
MMI_MAX_ITERATIONS = get_int_env('MMI_MAX_ITERATIONS', 60)
WF_MAX_ITERATIONS = get_int_env('WF_MAX_ITERATIONS', 60)
BARRIER_MU = get_float_env('BARRIER_MU', 20.0)
BARRIER_GAP_TOLERANCE = get_float_env('BARRIER_GAP_TOLERANCE', 1e-8)
NEWTON_TOLERANCE = get_float_env('NEWTON_TOLERANCE', 1e-9)
LINE_SEARCH_ALPHA = get_float_env('LINE_SEARCH_ALPHA', 0.1)
LINE_SEARCH_BETA = get_float_env('LINE_SEARCH_BETA', 0.5)

# Output
CSV_SIGNIFICANT_DIGITS = get_int_env('CSV_SIGNIFICANT_DIGITS', 6)
LOG_FILE = os.getenv('LOG_FILE', 'papc_sim.log')

# Application Settings
VERBOSE_MODE = get_bool_env('VERBOSE_MODE', False)
RUN_SLOW_TESTS = get_bool_env('RUN_SLOW_TESTS', False)

# Configuration validation
def validate_config():
    """Validate configuration settings"""
    errors = []

    if PAPC_WORKERS < 1:
        errors.append(f"Invalid PAPC_WORKERS: {PAPC_WORKERS}. Must be at least 1.")

    if BARRIER_MU <= 1.0:
        errors.append(f"Invalid BARRIER_MU: {BARRIER_MU}. Must be greater than 1.")

    if not 0.0 < LINE_SEARCH_ALPHA < 0.5:
        errors.append(f"Invalid LINE_SEARCH_ALPHA: {LINE_SEARCH_ALPHA}. Must lie in (0, 0.5).")

    if not 0.0 < LINE_SEARCH_BETA < 1.0:
        errors.append(f"Invalid LINE_SEARCH_BETA: {LINE_SEARCH_BETA}. Must lie in (0, 1).")

    if min(MPU_MAX_ITERATIONS, MMI_MAX_ITERATIONS, WF_MAX_ITERATIONS) < 1:
        errors.append("Solver iteration caps must be at least 1.")

    if CSV_SIGNIFICANT_DIGITS < 1:
        errors.append(f"Invalid CSV_SIGNIFICANT_DIGITS: {CSV_SIGNIFICANT_DIGITS}")

    return errors

# Print configuration warnings if any
config_errors = validate_config()
if config_errors and not os.getenv('SUPPRESS_CONFIG_WARNINGS'):
    print("⚠️  Configuration warnings:")
    for error in config_errors:
        print(f"   - {error}")
    print()
