"""
minklab - Minkowski norm geometry toolkit
"""

__version__ = "0.1.0"
