"""
lepoly

Lê polyhedra of plane germs f·ḡ: polar curve, Puiseux branches, discriminant
points, sheet monodromy and the resulting one-dimensional polyhedron of the
Milnor fibre.
"""

__version__ = "0.1.0"
__author__ = "lepoly developers"
