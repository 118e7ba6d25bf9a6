"""
Command-line front end and report aggregation.
"""

from henon_blowup.cli.perturbation import Perturbation, parse_perturbation
from henon_blowup.cli.report import ReportAggregator
from henon_blowup.cli.commands import (
    build_parser,
    parse_range,
    cmd_profile,
    cmd_spectrum,
    cmd_ggmt,
    cmd_scan,
    cmd_evolve,
    cmd_report,
    main
)

def run_cli(*argv):
    """
    Run one subcommand in-process.
    
    Args:
        *argv: Command-line words without the program name
        
    Returns:
        int: Exit code
    """
    return main([str(arg) for arg in argv])

__all__ = [
    'Perturbation',
    'parse_perturbation',
    'ReportAggregator',
    'build_parser',
    'parse_range',
    'cmd_profile',
    'cmd_spectrum',
    'cmd_ggmt',
    'cmd_scan',
    'cmd_evolve',
    'cmd_report',
    'main',
    'run_cli'
]
