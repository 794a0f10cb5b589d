"""
quadstat package initialization.
"""

__version__ = "1.0.0"
__author__ = "quadstat developers"
__description__ = "Exact workbench for quadratic-algebra realizations of generalized particle statistics"
