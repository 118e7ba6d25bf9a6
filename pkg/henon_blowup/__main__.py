"""
Batch entry point: ``python -m henon_blowup <subcommand>``.
"""
import sys

from henon_blowup.cli import main

if __name__ == "__main__":
    sys.exit(main())
