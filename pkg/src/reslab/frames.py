"""Time-ordered frame propagators, operator conjugation, and the
time-averaging oracle used to validate dressed-frame reductions.

A frame is the unitary family ``R(t) = T exp(-i \\int_0^t H(t') dt')``
generated by a (possibly time-dependent) Hermitian ``H``.  States map as
``psi -> R(t) psi`` and operators as ``O -> R O R^dag``.

The averaging oracle works at the superoperator level: averaging the
jump operator itself would discard the cross terms between different
oscillation frequencies that survive in ``O rho O^dag``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.integrate

from . import qmath
from .errors import DimensionMismatchError, IntegrationDivergenceError
from .lindblad import LindbladTerm, dissipator_matrix

__all__ = [
    "FrameTransform",
    "compose_frames",
    "time_ordered_propagator",
    "conjugate_operator",
    "transformed_dissipator_average",
    "EffectiveComparison",
    "compare_effective",
    "schroedinger_evolve",
]


@dataclass(frozen=True)
class FrameTransform:
    """Unitary frame ``R(t)`` with its Hermitian generator sampler."""

    sampler: Callable[[float], np.ndarray]
    generator_sampler: Callable[[float], np.ndarray]

    def __call__(self, t: float) -> np.ndarray:
        return self.sampler(t)

    @staticmethod
    def from_static_generator(g) -> "FrameTransform":
        """Frame generated by a constant Hermitian matrix: ``R(t) = exp(-i g t)``."""
        gm = qmath.as_operator(g)
        w, v = np.linalg.eigh(0.5 * (gm + qmath.dag(gm)))
        vd = qmath.dag(v)

        def sampler(t: float) -> np.ndarray:
            return (v * np.exp(-1j * w * t)) @ vd

        return FrameTransform(sampler=sampler, generator_sampler=lambda t: gm)

    @staticmethod
    def identity(dim: int) -> "FrameTransform":
        eye = np.eye(dim, dtype=complex)
        zero = np.zeros((dim, dim), dtype=complex)
        return FrameTransform(sampler=lambda t: eye, generator_sampler=lambda t: zero)


def compose_frames(outer: FrameTransform, inner: FrameTransform) -> FrameTransform:
    """Frame of the product ``R(t) = R_outer(t) R_inner(t)``.

    The generator follows from ``i dR/dt R^dag``:
    ``H = H_outer + R_outer H_inner R_outer^dag``.
    """

    def sampler(t: float) -> np.ndarray:
        return outer.sampler(t) @ inner.sampler(t)

    def generator(t: float) -> np.ndarray:
        ro = outer.sampler(t)
        return outer.generator_sampler(t) + ro @ inner.generator_sampler(t) @ qmath.dag(ro)

    return FrameTransform(sampler=sampler, generator_sampler=generator)


def _midpoint_product(h_sampler, t: float, steps: int) -> np.ndarray:
    h0 = qmath.as_operator(h_sampler(0.5 * t / steps))
    u = np.eye(h0.shape[0], dtype=complex)
    dt = t / steps
    for k in range(steps):
        hk = h_sampler((k + 0.5) * dt)
        u = qmath.expm_hermitian_generator(hk, dt) @ u  # latest time leftmost
    return u


def time_ordered_propagator(
    h_sampler,
    t: float,
    steps: int = 64,
    *,
    tol: float = 1e-8,
    max_doublings: int = 16,
) -> np.ndarray:
    """Time-ordered exponential ``T exp(-i \\int_0^t H dt')``.

    Product of midpoint-rule exponentials, latest time leftmost.  Each
    factor is a true exponential of a Hermitian sample, so the result is
    exactly unitary; the step count is doubled until doubling changes the
    result by at most ``tol`` (max-abs entry).
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if t == 0.0:
        h0 = qmath.as_operator(h_sampler(0.0))
        return np.eye(h0.shape[0], dtype=complex)
    coarse = _midpoint_product(h_sampler, t, steps)
    achieved = np.inf
    for _ in range(max_doublings):
        steps *= 2
        fine = _midpoint_product(h_sampler, t, steps)
        achieved = float(np.max(np.abs(fine - coarse)))
        if achieved <= tol:
            return fine
        coarse = fine
    raise IntegrationDivergenceError(achieved, tol, "time-ordered propagator did not refine")


def conjugate_operator(r, o) -> np.ndarray:
    """Frame-transformed operator ``R O R^dag``."""
    rm = qmath.as_operator(r)
    om = qmath.as_operator(o)
    if rm.shape != om.shape:
        raise DimensionMismatchError(f"frame shape {rm.shape} != operator shape {om.shape}")
    return rm @ om @ qmath.dag(rm)


def transformed_dissipator_average(
    term: LindbladTerm,
    period: float,
    *,
    n_points: int = 256,
    tol: float = 1e-10,
    max_doublings: int = 8,
) -> np.ndarray:
    """Average the superoperator of a periodically time-dependent jump term
    over one period.

    Returns a constant Liouvillian fragment (``dim^2 x dim^2``), suitable
    as the ``extra_generator`` of a :class:`MasterEquation`.  The uniform
    midpoint grid makes the average exact for any trigonometric
    polynomial whose harmonics are below the grid size; the grid is
    doubled until the fragment is stable within ``tol``.
    """
    if period <= 0:
        raise ValueError("period must be positive")

    def average(n: int) -> np.ndarray:
        ts = (np.arange(n) + 0.5) * (period / n)
        acc = None
        for t in ts:
            d = dissipator_matrix(term.operator_at(t), term.rate, term.factor)
            acc = d if acc is None else acc + d
        return acc / n

    coarse = average(n_points)
    achieved = np.inf
    for _ in range(max_doublings):
        n_points *= 2
        fine = average(n_points)
        achieved = float(np.max(np.abs(fine - coarse)))
        if achieved <= tol * max(1.0, float(np.max(np.abs(fine)))):
            return fine
        coarse = fine
    raise IntegrationDivergenceError(achieved, tol, "dissipator average did not converge")


def schroedinger_evolve(
    hamiltonian,
    psi0,
    times,
    *,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> np.ndarray:
    """Integrate ``i dpsi/dt = H(t) psi`` on a time grid (DOP853).

    ``hamiltonian`` may be a static matrix or a sampler; returns an array
    of shape ``(len(times), dim)``.
    """
    times = np.asarray(times, dtype=float)
    psi0 = qmath.as_ket(psi0)
    if callable(hamiltonian):
        sample = hamiltonian
    else:
        h_static = qmath.as_operator(hamiltonian)
        sample = lambda t: h_static  # noqa: E731

    def rhs(t, y):
        return -1j * (sample(t) @ y)

    sol = scipy.integrate.solve_ivp(
        rhs,
        (times[0], times[-1]),
        psi0,
        t_eval=times,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegrationDivergenceError(np.nan, rtol, f"solve_ivp failed: {sol.message}")
    return sol.y.T.copy()


@dataclass(frozen=True)
class EffectiveComparison:
    """Fidelity record of a full-model versus effective-model evolution."""

    time_grid: np.ndarray
    fidelity_series: np.ndarray

    @property
    def worst_fidelity(self) -> float:
        return float(np.min(self.fidelity_series))


def compare_effective(
    full,
    effective,
    psi0,
    horizon: float,
    *,
    n_samples: int = 201,
    frame: FrameTransform | Callable[[float], np.ndarray] | None = None,
) -> EffectiveComparison:
    """Evolve ``psi0`` under a full (possibly time-dependent) Hamiltonian and
    under a static effective one and record ``|<psi_full|psi_eff>|^2``.

    ``psi0`` is given in full-frame coordinates.  ``frame`` maps
    effective-frame states back into the full frame, so the effective side
    starts from ``R(0)^dag psi0`` and is compared as
    ``psi_eff(t) = R(t) exp(-i H_eff t) R(0)^dag psi0``.
    """
    times = np.linspace(0.0, horizon, n_samples)
    psi0 = qmath.normalized(psi0)
    full_states = schroedinger_evolve(full, psi0, times)

    h_eff = qmath.as_operator(effective)
    w, v = np.linalg.eigh(0.5 * (h_eff + qmath.dag(h_eff)))
    r = frame.sampler if isinstance(frame, FrameTransform) else frame
    psi_eff0 = qmath.dag(r(0.0)) @ psi0 if r is not None else psi0
    coeff = qmath.dag(v) @ psi_eff0

    fids = np.empty(n_samples)
    for i, t in enumerate(times):
        psi_eff = v @ (np.exp(-1j * w * t) * coeff)
        if r is not None:
            psi_eff = r(t) @ psi_eff
        fids[i] = abs(np.vdot(full_states[i], psi_eff)) ** 2
    return EffectiveComparison(time_grid=times, fidelity_series=fids)
