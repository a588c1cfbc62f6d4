"""Small dense complex linear algebra.

Matrices and vectors are plain ``numpy`` complex128 arrays. Only what the
precoder and channel code need lives here: products, conjugate transpose,
Euclidean norm and the right pseudo-inverse used by zero-forcing.
"""
import numpy as np

from . import _backend

ATOL = 1e-12
RTOL = 1e-9
DEFAULT_COND_CAP = 1e12


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when Gaussian elimination meets a (relatively) vanishing pivot.

    ``pivot`` is the magnitude of the offending pivot, or of the smallest
    pivot when the rejection came from the conditioning cap.
    """

    def __init__(self, pivot, message=None):
        self.pivot = float(pivot)
        super().__init__(message or f"matrix is singular to working precision (pivot {self.pivot:.3e})")


def as_matrix(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    return a


def as_vector(v):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1 or v.shape[0] == 0:
        raise ValueError(f"expected a non-empty 1-D vector, got shape {v.shape}")
    return v


def close(x, y, atol=ATOL, rtol=RTOL):
    """Elementwise ``|x - y| <= atol + rtol * |y|``, reduced with ``all``."""
    x = np.asarray(x)
    y = np.asarray(y)
    return bool(np.all(np.abs(x - y) <= atol + rtol * np.abs(y)))


def matmul(a, b):
    a = as_matrix(a)
    b = as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    return a @ b


def hermitian(a):
    """Conjugate transpose: ``result[i, j] == conj(a[j, i])``."""
    return as_matrix(a).conj().T.copy()


def vec_norm2(v):
    return float(np.sqrt(np.sum(np.abs(as_vector(v)) ** 2)))


def solve(a, b):
    """Solve the square system ``a @ x = b`` (partial pivoting).

    Raises :class:`SingularMatrixError` carrying the pivot magnitude when a
    pivot falls below ``1e-12`` times the largest row norm of ``a``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"solve needs a square matrix, got {a.shape}")
    x, ok, min_piv, _ = _backend.kernels.gauss_solve(a, b)
    if not ok:
        raise SingularMatrixError(min_piv)
    return x


def right_pseudo_inverse(h, cond_cap=DEFAULT_COND_CAP):
    """Return ``W = H^H (H H^H)^{-1}`` so that ``H @ W`` is the identity.

    ``h`` must have full row rank (rows <= cols). Besides the relative pivot
    test, the ratio of the largest to the smallest elimination pivot is
    compared against ``cond_cap`` as a cheap conditioning guard.
    """
    h = as_matrix(h)
    k, m = h.shape
    if k > m:
        raise ValueError(f"right pseudo-inverse needs rows <= cols, got {h.shape}")
    gram = h @ h.conj().T
    # solve (H H^H) Y = H, then W = Y^H (the Gram matrix is Hermitian)
    y, ok, min_piv, max_piv = _backend.kernels.gauss_solve(gram, h)
    if not ok:
        raise SingularMatrixError(min_piv)
    if max_piv / min_piv > cond_cap:
        raise SingularMatrixError(
            min_piv, f"Gram matrix too ill-conditioned (pivot ratio {max_piv / min_piv:.3e})"
        )
    w = y.conj().T.copy()
    resid = np.linalg.norm(h @ w - np.eye(k)) / np.sqrt(k)
    if resid > RTOL:
        raise SingularMatrixError(min_piv, f"pseudo-inverse residual {resid:.3e} exceeds {RTOL:g}")
    return w
