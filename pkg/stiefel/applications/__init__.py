"""
Applications of the logarithm: Karcher means, statistics of probability
densities and planar shapes, and interpolation of orthonormal bases.
"""
