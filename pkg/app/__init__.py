"""Equidistribution laboratory for fixed points of modular correspondences."""
