"""
Gallai path covers for series-parallel graphs and planar 3-trees
Certified small edge decompositions into simple paths, with an exact oracle for small inputs
"""

__version__ = "1.0.0"
__author__ = "Gallai Covers Team"
