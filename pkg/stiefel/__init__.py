"""
Riemannian exponential, logarithm and distance on the Stiefel manifold
under the canonical metric.
"""
__version__ = '1.0.0'
