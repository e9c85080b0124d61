"""
Matrix exponential machinery: the structured matrix of a geodesic, its
Kronecker-form Jacobians and the Fréchet derivative of the exponential.
"""
import numpy as np
import scipy.linalg

from stiefel.manifold import NumericError


class FrechetError(NumericError):
    """Raised when the Fréchet derivative of exp cannot be evaluated"""
    pass


class StructuredA:
    """
    The matrix ``A = [[Omega, -K^T], [K, 0]]`` generating a geodesic.

    ``omega`` is p-by-p skew-symmetric and ``k`` is (n-p)-by-p.
    """
    __slots__ = ['omega', 'k', 'dim', '_matrix']

    def __init__(self, omega, k):
        omega = np.asarray(omega, dtype=float)
        k = np.asarray(k, dtype=float)
        p = omega.shape[0]
        if omega.shape != (p, p) or k.ndim != 2 or k.shape[1] != p:
            raise ValueError('Incompatible blocks {} and {}'
                             .format(omega.shape, k.shape))
        self.omega = omega
        self.k = k
        self.dim = p + k.shape[0]
        self._matrix = None

    @classmethod
    def from_coordinates(cls, coords):
        """
        :param stiefel.manifold.TangentCoordinates coords: coordinates
        :rtype: StructuredA
        """
        return cls(coords.omega, coords.k)

    @property
    def p(self):
        return self.omega.shape[0]

    @property
    def matrix(self):
        if self._matrix is None:
            p = self.p
            result = np.zeros((self.dim, self.dim))
            result[:p, :p] = self.omega
            result[p:, :p] = self.k
            result[:p, p:] = -self.k.T
            result.flags.writeable = False
            self._matrix = result
        return self._matrix

    @property
    def alpha(self):
        """Spectral norm of the assembled matrix"""
        return np.linalg.norm(self.matrix, 2)

    def __repr__(self):
        return 'StructuredA(n={}, p={})'.format(self.dim, self.p)


class FrechetJacobian:
    """
    Kronecker representation of the Fréchet derivative of exp at A:
    ``vec(Dexp(A)[E]) = matrix @ vec(E)``.
    """
    __slots__ = ['matrix', 'alpha']

    def __init__(self, matrix, alpha):
        """Constructor

        :param numpy.ndarray matrix: N-by-N Jacobian, N = n^2
        :param float alpha: spectral norm of A
        """
        self.matrix = matrix
        self.alpha = alpha

    def singular_values(self):
        return scipy.linalg.svdvals(self.matrix)

    def __repr__(self):
        return 'FrechetJacobian(size={}, alpha={:.6g})'.format(
            self.matrix.shape[0], self.alpha)
