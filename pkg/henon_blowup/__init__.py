# Henon Blowup Numerical Lab
# Version: 0.1.0
"""
Numerical laboratory for stable blowup of the focusing cubic heat equation
with a defocusing Hénon-type perturbation.
"""

__version__ = "0.1.0"
