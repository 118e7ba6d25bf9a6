"""
Configuration utilities for the Henon blowup lab.
"""
import os
from dotenv import load_dotenv, dotenv_values
import logging

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

def get_config(key, default=None):
    """
    Get a configuration value from environment variables.
    
    Args:
        key: Name of the environment variable
        default: Default value to return if the key is not found
        
    Returns:
        The configuration value if found, otherwise the default value
    """
    return os.getenv(key, default)

def get_verbose():
    """Get the verbose flag; when set, runs log at DEBUG regardless of --log-level."""
    return get_config("HBL_VERBOSE", "False").lower() == "true"

def get_out_dir():
    """Get the output directory, falling back to the local lab workspace."""
    return get_config(
        "HBL_OUT_DIR",
        os.path.join(os.getcwd(), "lab_workspace", "outputs")
    )

def get_log_level():
    """Get the logging level name."""
    return get_config("HBL_LOG_LEVEL", "INFO").upper()

def get_workers():
    """Get the number of worker threads used by parameter sweeps."""
    value = get_config("HBL_WORKERS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning(f"HBL_WORKERS={value!r} is not an integer, using 1")
        return 1

def load_config_file(path):
    """
    Load a plain key=value configuration file.
    
    Keys are normalised to lower case with dashes turned into underscores so
    they line up with command-line destinations.
    
    Args:
        path: Path to the file, or None
        
    Returns:
        dict: Mapping of option name to its raw string value
    """
    if not path:
        return {}
    if not os.path.exists(path):
        logger.error(f"Config file not found: {path}")
        raise FileNotFoundError(path)
    values = dotenv_values(path)
    config = {}
    for key, value in values.items():
        if value is None:
            continue
        config[key.strip().lower().replace("-", "_")] = value.strip()
    logger.info(f"Loaded {len(config)} settings from {path}")
    return config

def set_log_level(level_name):
    """Apply a logging level to the root logger."""
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        logger.warning(f"Unknown log level {level_name!r}, keeping current level")
        return
    logging.getLogger().setLevel(level)
