"""
Utility functions for the Henon blowup lab.
"""
from henon_blowup.utils.config import (
    get_config,
    get_verbose,
    get_out_dir,
    get_log_level,
    get_workers,
    load_config_file,
    set_log_level
)
from henon_blowup.utils.output import (
    ResultWriter,
    RunManifest,
    load_output,
    SCHEMAS,
    SCHEMA_VERSION
)

__all__ = [
    'get_config',
    'get_verbose',
    'get_out_dir',
    'get_log_level',
    'get_workers',
    'load_config_file',
    'set_log_level',
    'ResultWriter',
    'RunManifest',
    'load_output',
    'SCHEMAS',
    'SCHEMA_VERSION'
]
