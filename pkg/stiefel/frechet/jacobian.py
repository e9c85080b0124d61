"""
Jacobians of the structured matrix and of the matrix exponential.
"""
import logging

import numpy as np
import scipy.linalg

from stiefel.frechet import FrechetError, FrechetJacobian, StructuredA
from stiefel.frechet.kronecker import ShuffleMap, SkewBasis
from stiefel.manifold import InvalidArgumentError
from stiefel.manifold.core import manifold_dimension, skew_dimension

logger = logging.getLogger('Frechet')

SKEW_TOLERANCE = 1e-12
IMAGINARY_RESIDUE_TOLERANCE = 1e-10


def _as_matrix(a):
    if isinstance(a, StructuredA):
        return a.matrix
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidArgumentError('Expected a square matrix, got shape {}'
                                   .format(a.shape))
    return a


def _as_skew_matrix(a):
    a = _as_matrix(a)
    residual = np.linalg.norm(a + a.T)
    if residual > SKEW_TOLERANCE * max(1.0, np.linalg.norm(a)):
        raise InvalidArgumentError('Matrix is not skew-symmetric', residual)
    return a


def assemble_A(coords):
    """Generator ``A(x) = [Omega, -K^T; K, 0]`` of the geodesic with the given
    coordinates

    :param stiefel.manifold.TangentCoordinates coords: coordinates
    :rtype: stiefel.frechet.StructuredA
    """
    return StructuredA.from_coordinates(coords)


def jacobian_A_x(n, p):
    """Jacobian of ``blkvec(A(x))`` with respect to the packed coordinates

    The rows follow the block-wise vectorization, the blocks being
    ``[B, 0; 0, I; 0, -Pi_{n-p,p}; 0, 0]``. Multiply from the left by the
    block-vec permutation to obtain the Jacobian of ``vec(A(x))``.

    :param int n: number of rows of the points
    :param int p: number of columns of the points
    :rtype: numpy.ndarray
    """
    q = n - p
    s = skew_dimension(p)
    result = np.zeros((n * n, manifold_dimension(n, p)))
    result[:p * p, :s] = SkewBasis(p).matrix
    result[p * p:p * p + q * p, s:] = np.eye(q * p)
    result[p * p + q * p:p * p + 2 * q * p, s:] = \
        -ShuffleMap(q, p).matrix()
    return result


def frechet_exp_oracle(a, e):
    """Fréchet derivative ``Dexp(A)[E]`` from the block triangular identity

    ``exp([[A, E], [0, A]]) = [[exp A, Dexp(A)[E]], [0, exp A]]``

    :param numpy.ndarray a: n-by-n matrix
    :param numpy.ndarray e: n-by-n direction
    :rtype: numpy.ndarray
    """
    a = _as_matrix(a)
    e = np.asarray(e, dtype=float)
    if e.shape != a.shape:
        raise InvalidArgumentError('Direction of shape {} does not match a '
                                   'matrix of shape {}'
                                   .format(e.shape, a.shape))
    n = a.shape[0]
    block = np.zeros((2 * n, 2 * n))
    block[:n, :n] = a
    block[n:, n:] = a
    block[:n, n:] = e
    return scipy.linalg.expm(block)[:n, n:]


def sinch(y):
    """``sinh(y) / y`` elementwise, with value 1 at 0"""
    y = np.asarray(y, dtype=complex)
    result = np.ones_like(y)
    small = np.abs(y) < 1e-8
    result[small] = 1 + y[small] ** 2 / 6
    large = ~small
    result[large] = np.sinh(y[large]) / y[large]
    return result


def _skew_spectrum(a):
    """Eigenvalues and unitary eigenvectors of a skew-symmetric matrix

    Goes through the Hermitian matrix ``iA`` so that repeated eigenvalues
    still get an orthonormal set of eigenvectors.
    """
    try:
        mu, u = scipy.linalg.eigh(1j * a)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise FrechetError('Eigendecomposition failed: {}'.format(e),
                           condition=np.linalg.cond(a)) from e
    return -1j * mu, u


def expm_skew(a):
    """Exponential of a skew-symmetric matrix via its eigendecomposition

    :param a: skew-symmetric matrix or :class:`StructuredA`
    :rtype: numpy.ndarray
    """
    a = _as_skew_matrix(a)
    lam, u = _skew_spectrum(a)
    return np.real((u * np.exp(lam)) @ u.conj().T)


def sinch_of_kronecker_sum(a):
    """``sinch`` of ``(A^T (+) (-A)) / 2`` for a skew-symmetric A

    The Kronecker sum is diagonalized by ``U kron U`` with eigenvalues
    ``conj(lambda_i) - lambda_j``, which makes the matrix function a scaling
    of the spectrum.

    :param a: skew-symmetric matrix or :class:`StructuredA`
    :rtype: numpy.ndarray
    """
    a = _as_skew_matrix(a)
    lam, u = _skew_spectrum(a)
    w = np.kron(u, u)
    spectrum = np.add.outer(lam.conj(), -lam).ravel()
    result = (w * sinch(spectrum / 2)) @ w.conj().T
    residue = np.max(np.abs(result.imag), initial=0.0)
    if residue > IMAGINARY_RESIDUE_TOLERANCE:
        logger.warning('Imaginary residue {:.3e} discarded from sinch of the '
                       'Kronecker sum'.format(residue))
    return np.real(result)


def jacobian_exp(a):
    """Jacobian of ``vec(exp(A))`` with respect to ``vec(A)``

    ``(exp(A^T / 2) kron exp(A / 2)) sinch((A^T (+) (-A)) / 2)``

    :param a: skew-symmetric matrix or :class:`StructuredA`
    :raise InvalidArgumentError: if A is not skew-symmetric
    :rtype: FrechetJacobian
    """
    a = _as_skew_matrix(a)
    half = scipy.linalg.expm(a / 2)
    matrix = np.kron(half.T, half) @ sinch_of_kronecker_sum(a)
    return FrechetJacobian(matrix, np.linalg.norm(a, 2))


def jacobian_exp_apply(a, directions):
    """Product of the Jacobian of exp at a skew A with a block of directions

    Same result as ``jacobian_exp(a).matrix @ directions``, computed one
    direction at a time in the eigenbasis of A in O(n^3) operations per
    column, without forming any n^2-by-n^2 matrix.

    :param a: skew-symmetric matrix or :class:`StructuredA`
    :param numpy.ndarray directions: n^2-by-k matrix of vectorized directions
    :raise InvalidArgumentError: if A is not skew-symmetric
    :rtype: numpy.ndarray
    """
    a = _as_skew_matrix(a)
    n = a.shape[0]
    directions = np.asarray(directions, dtype=float)
    if directions.ndim != 2 or directions.shape[0] != n * n:
        raise InvalidArgumentError('Expected {} rows of directions, got '
                                   'shape {}'.format(n * n, directions.shape))
    k = directions.shape[1]
    lam, u = _skew_spectrum(a)
    scale = sinch(np.add.outer(lam.conj(), -lam) / 2).T
    half = scipy.linalg.expm(a / 2)
    # Column c of directions is vec(x[c])
    x = np.reshape(directions.T, (k, n, n)).transpose(0, 2, 1)
    y = (u.conj().T @ x @ u.conj()) * scale
    result = np.real(half @ u @ y @ u.T @ half)
    return np.reshape(result.transpose(0, 2, 1), (k, n * n)).T


def jacobian_exp_block(a):
    """Jacobian of ``vec(exp(A))`` for a general square A

    Uses the upper right block of the exponential of
    ``[[A^T kron I, I], [0, I kron A]]``.

    :param a: square matrix or :class:`StructuredA`
    :rtype: FrechetJacobian
    """
    a = _as_matrix(a)
    n = a.shape[0]
    size = n * n
    identity = np.eye(n)
    block = np.zeros((2 * size, 2 * size))
    block[:size, :size] = np.kron(a.T, identity)
    block[size:, size:] = np.kron(identity, a)
    block[:size, size:] = np.eye(size)
    matrix = scipy.linalg.expm(block)[:size, size:]
    return FrechetJacobian(matrix, np.linalg.norm(a, 2))


def singular_bounds(a):
    """Extreme singular values of the Jacobian of exp at a skew matrix

    :param a: skew-symmetric matrix or :class:`StructuredA`
    :return: ``(1, |sinc(||A||_2)|)``
    :rtype: (float, float)
    """
    alpha = np.linalg.norm(_as_skew_matrix(a), 2)
    return 1.0, abs(float(np.sinc(alpha / np.pi)))
