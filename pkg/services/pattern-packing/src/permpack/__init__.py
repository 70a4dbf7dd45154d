"""
permpack: exact permutation-pattern densities, Price polynomials and
packing / minimization bounds for layered patterns.
"""
__version__ = "1.0.0"
