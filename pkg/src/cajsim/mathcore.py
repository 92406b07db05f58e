"""Shared numerical kernels.

Everything downstream (estimators, detection, analysis) is built on a small
set of primitives collected here: a complex SVD with a fixed phase convention,
deterministic orthonormal-basis completion, the chi-squared CDF, the Bessel
function J0, and seeded circularly symmetric complex Gaussian sampling.

The SVD and special functions delegate to LAPACK / scipy; this module only
adds the conventions and error contracts the rest of the package relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "NumericalFailure",
    "DegenerateInput",
    "SvdResult",
    "svd",
    "fix_phase",
    "orthonormalize",
    "orthonormal_complement",
    "chi2_cdf",
    "bessel_j0",
    "sample_cscg",
]

# Candidate vectors whose residual after projection falls below this are
# considered inside the span and skipped during basis completion.
COMPLETION_TOLERANCE = 1e-6


class NumericalFailure(RuntimeError):
    """A numerical routine failed to converge or produce a usable result."""


class DegenerateInput(ValueError):
    """An input matrix is rank deficient where independent columns are required."""


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD with deterministic sign/phase.

    Attributes
    ----------
    u : ndarray
        Left singular vectors as columns, ordered by descending singular
        value.  When computed with ``full=True`` the trailing columns
        complete an orthonormal basis of the column space.
    s : ndarray
        Singular values, descending, length ``min(m, n)``.
    v : ndarray
        Right singular vectors as columns (not conjugate transposed), one per
        singular value.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        r = self.s.size
        return (self.u[:, :r] * self.s) @ self.v[:, :r].conj().T


def fix_phase(u: np.ndarray, v: np.ndarray | None = None):
    """Rotate each column of ``u`` so its largest-modulus entry is real positive.

    Ties go to the first maximal entry.  If ``v`` is given, its columns are
    rotated by the same phases so any product ``u @ diag(s) @ v^H`` is
    unchanged.  Works on stacks: the last two axes are (rows, columns).
    """
    mags = np.abs(u)
    rows = np.argmax(mags, axis=-2)
    pivot = np.take_along_axis(u, rows[..., None, :], axis=-2)[..., 0, :]
    mod = np.abs(pivot)
    # a zero column has no meaningful phase; leave it alone
    phase = np.where(mod > 0.0, pivot / np.where(mod > 0.0, mod, 1.0), 1.0)
    u_fixed = u * phase.conj()[..., None, :]
    if v is None:
        return u_fixed
    k = min(u.shape[-1], v.shape[-1])
    v_fixed = np.array(v)
    v_fixed[..., :, :k] = v[..., :, :k] * phase.conj()[..., None, :k]
    return u_fixed, v_fixed


def svd(matrix: np.ndarray, full: bool = False) -> SvdResult:
    """Complex SVD with the package-wide phase convention applied.

    Parameters
    ----------
    matrix : array_like
        Two-dimensional complex (or real) matrix with finite entries.
    full : bool
        When True, return all ``m`` left singular vectors even for wide
        matrices (the trailing ones span the residual column space).

    Raises
    ------
    ValueError
        If the input is not a finite two-dimensional matrix.  The message
        names the offending shape.
    NumericalFailure
        If the underlying factorization does not converge.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"svd expects a 2-d matrix, got shape {a.shape}")
    a = a.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError(f"svd input of shape {a.shape} contains non-finite entries")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=full)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK rarely fails
        raise NumericalFailure(f"SVD failed to converge for shape {a.shape}") from exc
    u, v = fix_phase(u, vh.conj().swapaxes(-2, -1))
    return SvdResult(u=u, s=s, v=v)


def _project_out(vec: np.ndarray, basis_cols: list[np.ndarray]) -> np.ndarray:
    for q in basis_cols:
        vec = vec - q * (q.conj() @ vec)
    return vec


def orthonormalize(columns: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Raises :class:`DegenerateInput` when the columns are not linearly
    independent to working precision.
    """
    m = np.asarray(columns, dtype=np.complex128)
    if m.ndim == 1:
        m = m[:, None]
    out: list[np.ndarray] = []
    for i in range(m.shape[1]):
        v = _project_out(m[:, i], out)
        v = _project_out(v, out)  # second pass, keeps the Gram error near eps
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise DegenerateInput(f"column {i} is linearly dependent on the preceding ones")
        out.append(v / norm)
    return np.column_stack(out)


def orthonormal_complement(basis: np.ndarray) -> np.ndarray:
    """Complete orthonormal columns to a full basis and return the new part.

    The completion is deterministic: standard basis vectors e_0, e_1, ... are
    tried in order, each projected against everything accepted so far, and
    kept when the residual norm stays above ``COMPLETION_TOLERANCE``.

    Parameters
    ----------
    basis : array_like
        Vector or (n, k) matrix with orthonormal columns, k < n.

    Returns
    -------
    ndarray
        (n, n - k) matrix whose columns are orthonormal and orthogonal to
        every input column.
    """
    b = np.asarray(basis, dtype=np.complex128)
    if b.ndim == 1:
        b = b[:, None]
    if b.ndim != 2:
        raise ValueError(f"expected a vector or matrix, got shape {b.shape}")
    n, k = b.shape
    if k >= n:
        raise ValueError(f"cannot complement {k} columns in dimension {n}")
    norms = np.linalg.norm(b, axis=0)
    if np.any(norms < 1e-12):
        raise DegenerateInput("basis contains a (near) zero column")
    q = b / norms
    gram = q.conj().T @ q
    if np.max(np.abs(gram - np.eye(k))) > 1e-8:
        raise DegenerateInput("basis columns are not orthonormal after scaling")

    accepted = [q[:, i] for i in range(k)]
    new_cols: list[np.ndarray] = []
    for idx in range(n):
        if len(new_cols) == n - k:
            break
        e = np.zeros(n, dtype=np.complex128)
        e[idx] = 1.0
        v = _project_out(e, accepted)
        if np.linalg.norm(v) < COMPLETION_TOLERANCE:
            continue  # candidate lies (almost) inside the current span
        v = _project_out(v, accepted)
        v /= np.linalg.norm(v)
        accepted.append(v)
        new_cols.append(v)
    if len(new_cols) != n - k:
        raise NumericalFailure(
            f"basis completion found {len(new_cols)} of {n - k} directions"
        )
    return np.column_stack(new_cols)


def chi2_cdf(x, dof: int):
    """CDF of the chi-squared distribution with ``dof`` degrees of freedom.

    Evaluated through the regularized lower incomplete gamma function.
    Scalar or array ``x``; negative arguments raise ValueError.
    """
    if dof < 1 or int(dof) != dof:
        raise ValueError(f"degrees of freedom must be a positive integer, got {dof}")
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr < 0.0):
        raise ValueError("chi2_cdf is defined for x >= 0")
    out = special.gammainc(dof / 2.0, arr / 2.0)
    return float(out) if np.isscalar(x) else out


def bessel_j0(x):
    """Bessel function of the first kind, order zero."""
    out = special.j0(x)
    return float(out) if np.isscalar(x) else out


def sample_cscg(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples, CN(0, variance).

    Real and imaginary parts are drawn interleaved per element so the stream
    consumption is independent of the requested shape's factorization.
    """
    if variance < 0.0:
        raise ValueError(f"variance must be nonnegative, got {variance}")
    if np.isscalar(shape):
        shape = (int(shape),)
    pairs = rng.standard_normal(tuple(shape) + (2,))
    z = pairs.view(np.complex128)[..., 0]
    return z * np.sqrt(variance / 2.0)
