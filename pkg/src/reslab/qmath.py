"""Dense complex linear algebra and quantum-state primitives.

Everything in this package works on plain ``numpy`` arrays with dtype
``complex128``.  The systems simulated here never exceed a dimension of
about twelve (a few ionic levels times a few Fock levels), so all storage
is dense and all decompositions are direct.

Conventions
-----------
* Kets are one-dimensional arrays, operators are square two-dimensional
  arrays.
* Propagators are generated as ``exp(-i H t)`` with Hermitian ``H`` in
  rad/s and ``t`` in seconds.
* Numerical negativity of density matrices is reported by the diagnostic
  helpers, never clipped; clipping would mask integrator bugs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, NotHermitianError

__all__ = [
    "as_operator",
    "as_ket",
    "dag",
    "projector",
    "normalized",
    "basis_ket",
    "kron",
    "expm_hermitian_generator",
    "fock_annihilation",
    "fidelity",
    "bloch_vector",
    "purity",
    "trace_distance",
    "partial_trace",
    "hermitian_defect",
    "unitarity_defect",
    "density_matrix_defects",
    "is_valid_density_matrix",
]


def as_operator(a) -> np.ndarray:
    """Coerce to a square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    return m


def as_ket(psi) -> np.ndarray:
    """Coerce to a one-dimensional complex state vector."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    if v.size == 0:
        raise DimensionMismatchError("empty state vector")
    return v


def dag(a: np.ndarray) -> np.ndarray:
    """Hermitian adjoint."""
    return np.conj(a).T


def projector(psi) -> np.ndarray:
    """Rank-one projector ``|psi><psi|``."""
    v = as_ket(psi)
    return np.outer(v, v.conj())


def normalized(psi) -> np.ndarray:
    v = as_ket(psi)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def basis_ket(dim: int, index: int) -> np.ndarray:
    if not 0 <= index < dim:
        raise DimensionMismatchError(f"basis index {index} out of range for dim {dim}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def hermitian_defect(a) -> float:
    """Largest absolute entry of ``A - A^dag``."""
    m = as_operator(a)
    return float(np.max(np.abs(m - dag(m)))) if m.size else 0.0


def unitarity_defect(u) -> float:
    """Largest absolute entry of ``U^dag U - I``."""
    m = as_operator(u)
    return float(np.max(np.abs(dag(m) @ m - np.eye(m.shape[0]))))


def kron(a, b) -> np.ndarray:
    """Tensor product of two operators (dims multiply)."""
    return np.kron(as_operator(a), as_operator(b))


def expm_hermitian_generator(h, t: float, *, atol: float = 1e-12) -> np.ndarray:
    """Unitary ``exp(-i H t)`` of a Hermitian generator, via eigendecomposition.

    Parameters
    ----------
    h : array_like
        Hermitian matrix (rad/s).
    t : float
        Evolution time (s).
    atol : float
        Hermiticity tolerance, relative to ``max|H|``.

    Raises
    ------
    NotHermitianError
        If ``max|H - H^dag|`` exceeds ``atol * max(1, max|H|)``.
    """
    m = as_operator(h)
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    defect = hermitian_defect(m)
    if defect > atol * scale:
        raise NotHermitianError(defect)
    w, v = np.linalg.eigh(m)
    return (v * np.exp(-1j * w * t)) @ dag(v)


def fock_annihilation(n_max: int) -> np.ndarray:
    """Lowering operator on the truncated Fock space {|0>, ..., |n_max>}.

    Matrix elements ``<n-1|a|n> = sqrt(n)``; the returned operator has
    dimension ``n_max + 1``.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def fidelity(rho, psi, *, atol: float = 1e-10) -> float:
    """Overlap ``<psi|rho|psi>`` between a state and a pure target.

    ``psi`` must be normalized; the result is real within ``atol`` and is
    returned as a float.
    """
    r = as_operator(rho)
    v = as_ket(psi)
    if r.shape[0] != v.size:
        raise DimensionMismatchError(f"state dim {v.size} != operator dim {r.shape[0]}")
    if abs(np.linalg.norm(v) - 1.0) > atol:
        raise ValueError("target ket is not normalized")
    val = complex(v.conj() @ r @ v)
    if abs(val.imag) > atol * max(1.0, abs(val.real)):
        raise ValueError(f"fidelity has a non-negligible imaginary part {val.imag:.3e}")
    return float(val.real)


def bloch_vector(rho, basis, *, atol: float = 1e-8) -> tuple[float, float, float]:
    """Bloch components of a qubit state in an orthonormal basis pair.

    With ``rho_01 = <b0|rho|b1>`` the components are ``x = 2 Re rho_01``,
    ``y = -2 Im rho_01`` and ``z = rho_00 - rho_11``.
    """
    r = as_operator(rho)
    b0, b1 = (normalized(b) for b in basis)
    if r.shape[0] != b0.size or b0.size != b1.size:
        raise DimensionMismatchError("basis kets do not match the operator dimension")
    if abs(np.vdot(b0, b1)) > atol:
        raise ValueError("basis pair is not orthonormal")
    r01 = complex(b0.conj() @ r @ b1)
    r00 = float(np.real(b0.conj() @ r @ b0))
    r11 = float(np.real(b1.conj() @ r @ b1))
    return (2.0 * r01.real, -2.0 * r01.imag, r00 - r11)


def purity(rho) -> float:
    r = as_operator(rho)
    return float(np.real(np.trace(r @ r)))


def trace_distance(a, b) -> float:
    """Trace distance ``0.5 * ||a - b||_1`` between two Hermitian matrices."""
    d = as_operator(a) - as_operator(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + dag(d))))))


def partial_trace(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one factor of a bipartite system.

    Parameters
    ----------
    rho : array_like
        Density matrix on the product space ``dims[0] * dims[1]``.
    dims : (int, int)
        Subsystem dimensions, ordered as in the tensor product.
    keep : int
        Index (0 or 1) of the subsystem to keep.
    """
    r = as_operator(rho)
    d0, d1 = dims
    if r.shape[0] != d0 * d1:
        raise DimensionMismatchError(f"dims {dims} do not factor dimension {r.shape[0]}")
    t = r.reshape(d0, d1, d0, d1)
    if keep == 0:
        return np.trace(t, axis1=1, axis2=3)
    if keep == 1:
        return np.trace(t, axis1=0, axis2=2)
    raise ValueError("keep must be 0 or 1")


def density_matrix_defects(rho) -> dict[str, float]:
    """Diagnostics for a density matrix: trace deviation, Hermiticity defect,
    and the smallest eigenvalue (negativity is reported, not repaired)."""
    r = as_operator(rho)
    herm = hermitian_defect(r)
    sym = 0.5 * (r + dag(r))
    return {
        "trace_deviation": float(abs(np.trace(r) - 1.0)),
        "hermiticity_defect": herm,
        "min_eigenvalue": float(np.min(np.linalg.eigvalsh(sym))),
    }


def is_valid_density_matrix(
    rho,
    *,
    trace_atol: float = 1e-9,
    herm_atol: float = 1e-10,
    eig_floor: float = -1e-8,
) -> bool:
    d = density_matrix_defects(rho)
    return (
        d["trace_deviation"] <= trace_atol
        and d["hermiticity_defect"] <= herm_atol
        and d["min_eigenvalue"] >= eig_floor
    )
