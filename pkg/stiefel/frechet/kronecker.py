"""
Index permutations and bases used to vectorize the structured matrix A.

Vectors are always column-stacked (``vec``), so that
``vec(A X B) = (B^T kron A) vec(X)``.
"""
import numpy as np

from stiefel.manifold.core import skew_indices, skew_dimension, vec


class ShuffleMap:
    """
    Perfect shuffle Pi_{m,n}: ``vec(X^T) = Pi vec(X)`` for an m-by-n X.

    Stored as an index array, ``Pi @ v == v[index]``.
    """
    __slots__ = ['m', 'n', 'index']

    def __init__(self, m, n):
        self.m = m
        self.n = n
        positions = np.arange(m * n).reshape(m, n, order='F')
        self.index = vec(positions.T)

    @property
    def inverse(self):
        result = np.empty_like(self.index)
        result[self.index] = np.arange(self.index.size)
        return result

    def apply(self, vector):
        """Apply Pi to a vector, or to the rows of a matrix"""
        return np.asarray(vector)[self.index]

    def matrix(self):
        """Dense permutation matrix (only for tests and small sizes)"""
        return np.eye(self.m * self.n)[self.index]


class SkewBasis:
    """
    Elementary basis ``E_ij - E_ji`` (i < j) of p-by-p skew matrices.

    The basis vectors are not normalized: ``B^T B = 2 I``.
    """
    __slots__ = ['p', 'matrix']

    def __init__(self, p):
        self.p = p
        rows, cols = skew_indices(p)
        basis = np.zeros((p * p, skew_dimension(p)))
        columns = np.arange(rows.size)
        basis[rows + cols * p, columns] = 1.0
        basis[cols + rows * p, columns] = -1.0
        self.matrix = basis

    @property
    def size(self):
        return self.matrix.shape[1]


class BlockVecMap:
    """
    The permutation T taking the block-wise vectorization of an n-by-n
    matrix with a leading p-by-p block,

        ``blkvec(A) = [vec(A11); vec(A21); vec(A12); vec(A22)]``,

    to ``vec(A)``. Stored as an index array: ``vec(A) = blkvec(A)[index]``.
    """
    __slots__ = ['n', 'p', 'index']

    def __init__(self, n, p):
        self.n = n
        self.p = p
        q = n - p
        rows, cols = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
        rows = vec(rows)
        cols = vec(cols)
        index = np.empty(n * n, dtype=int)

        top, left = rows < p, cols < p
        block = top & left
        index[block] = rows[block] + cols[block] * p
        block = ~top & left
        index[block] = p * p + (rows[block] - p) + cols[block] * q
        block = top & ~left
        index[block] = p * p + p * q + rows[block] + (cols[block] - p) * p
        block = ~top & ~left
        index[block] = (p * p + 2 * p * q + (rows[block] - p) +
                        (cols[block] - p) * q)
        self.index = index

    def blkvec(self, matrix):
        p = self.p
        return np.concatenate([vec(matrix[:p, :p]), vec(matrix[p:, :p]),
                               vec(matrix[:p, p:]), vec(matrix[p:, p:])])

    def apply(self, vector):
        """Map block-wise vectorized data (vector or matrix rows) to vec"""
        return np.asarray(vector)[self.index]


def kron_identity_left(left, matrix, count):
    """Compute ``(I_count kron left) @ matrix`` without forming the product

    :param numpy.ndarray left: a-by-b matrix
    :param numpy.ndarray matrix: (count * b)-by-c matrix
    :param int count: size of the identity factor
    :rtype: numpy.ndarray
    """
    a, b = left.shape
    cols = matrix.shape[1]
    blocks = matrix.reshape(count, b, cols)
    return np.einsum('ab,jbc->jac', left, blocks).reshape(count * a, cols)
