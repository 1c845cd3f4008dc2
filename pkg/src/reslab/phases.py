"""Geometric and dynamic phase extraction along pure-state trajectories,
plus Bloch-sphere path export.

The geometric phase is accumulated in the manifestly gauge-covariant
discrete (Pancharatnam) form

    phi_G = sum_k arg <psi_{k+1} | psi_k>  +  arg <psi_0 | psi_N>

which equals ``i * closed-loop integral of <psi|d psi>`` in the continuum
limit; the closure term makes the value independent of per-sample phase
conventions.  The sum of per-step principal arguments is the
continuity-unwrapped value (each step must stay well inside (-pi, pi),
which dense grids guarantee); the default report folds it into the
principal range (-2 pi, 0].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import IllConditionedPathError

__all__ = [
    "PhaseRecord",
    "principal_phase",
    "geometric_phase",
    "dynamic_phase",
    "phase_record",
    "export_bloch_path",
]


@dataclass(frozen=True)
class PhaseRecord:
    """Accumulated phases over one trajectory; ``total`` is the sum of the
    geometric and dynamic parts by construction."""

    geometric: float
    dynamic: float
    total: float
    cycle_time: float


def principal_phase(x: float) -> float:
    """Fold an angle into the principal range (-2 pi, 0]."""
    return -float((-x) % (2.0 * np.pi))


def geometric_phase(states, *, principal: bool = True, min_overlap: float = 1e-6) -> float:
    """Discrete Pancharatnam geometric phase of a pure-state trajectory.

    Parameters
    ----------
    states : sequence of kets
        Normalized states along the path; the closure term to the first
        state is always included.
    principal : bool
        Fold the result into (-2 pi, 0] (gauge-invariant representative).
        With ``principal=False`` the raw accumulation is returned, which
        tracks winding across multiple cycles but is sensitive to the
        gauge of the supplied kets.

    Raises
    ------
    IllConditionedPathError
        If any consecutive overlap magnitude falls below ``min_overlap``.
    """
    kets = [qmath.as_ket(s) for s in states]
    if len(kets) < 2:
        raise ValueError("need at least two states")
    acc = 0.0
    loop = kets + [kets[0]]
    for a, b in zip(loop[:-1], loop[1:]):
        ov = np.vdot(b, a)  # <psi_{k+1} | psi_k>
        if abs(ov) < min_overlap:
            raise IllConditionedPathError(
                f"consecutive overlap magnitude {abs(ov):.2e} below {min_overlap:.1e}"
            )
        acc += float(np.angle(ov))
    return principal_phase(acc) if principal else acc


def dynamic_phase(states, times, h_sampler) -> float:
    """Dynamic phase ``-integral <psi(t)|H(t)|psi(t)> dt`` (trapezoidal)."""
    times = np.asarray(times, dtype=float)
    kets = [qmath.as_ket(s) for s in states]
    if len(kets) != times.size:
        raise ValueError("states and times must have equal length")
    for k in kets:
        if abs(np.linalg.norm(k) - 1.0) > 1e-8:
            raise ValueError("states must be normalized")
    energies = np.array(
        [float(np.real(np.vdot(k, h_sampler(t) @ k))) for k, t in zip(kets, times)]
    )
    return -float(np.trapezoid(energies, times))


def phase_record(states, times, h_sampler) -> PhaseRecord:
    """Geometric plus dynamic phase bookkeeping for one cycle."""
    times = np.asarray(times, dtype=float)
    geo = geometric_phase(states)
    dyn = dynamic_phase(states, times, h_sampler)
    return PhaseRecord(
        geometric=geo,
        dynamic=dyn,
        total=geo + dyn,
        cycle_time=float(times[-1] - times[0]),
    )


def export_bloch_path(states, times, basis) -> np.ndarray:
    """Sampled Bloch coordinates ``(t, x, y, z)`` of a qubit trajectory.

    ``states`` may be kets or density matrices.
    """
    times = np.asarray(times, dtype=float)
    rows = np.empty((times.size, 4))
    for i, (s, t) in enumerate(zip(states, times)):
        arr = np.asarray(s, dtype=complex)
        rho = qmath.projector(arr) if arr.ndim == 1 else arr
        x, y, z = qmath.bloch_vector(rho, basis)
        rows[i] = (t, x, y, z)
    return rows
