"""Exact-arithmetic operad machinery on triangular tensor spaces.

Builds the graded insertion structures on tensor words, grids, and
triangular tensors, the relation ideal that generalizes the exterior
algebra, and computes the resulting quotient dimension tables by sparse
rank over the rationals and prime fields.
"""

__version__ = "0.1.0"
