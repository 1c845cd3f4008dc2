"""Ion-cavity model builders: drive/cavity Hamiltonians, dressed bases and
frames, the engineered reduced master equation, protected states, and
closed-form fidelity predictions.

Basis conventions (fixed package-wide):

* bare two-level basis ordered ``(|e>, |g>)``;
* drive-dressed basis ``|+-> = (|e> +- e^{-i phi1} |g>)/sqrt(2)`` and the
  doubly dressed pair ``|up/down> = (|+> +- e^{-i phi} |->)/sqrt(2)`` with
  ``phi = phi1 - phi2``;
* detuned-drive dressed pair
  ``|T+-> = (sqrt(2 +- chi) |e> +- e^{-i phi1} sqrt(2 -+ chi) |g>)/2``
  with ``chi = delta1/lambda`` and ``lambda = sqrt(omega1^2 + delta1^2/4)``;
* composite spaces are ordered (two-level factor) x (Fock factor).

All dressed bases are constructed from these closed forms rather than
numerical eigensolvers so that global phases are pinned once.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import qmath
from .errors import RegimeError
from .frames import FrameTransform, compose_frames
from .lindblad import LindbladTerm, MasterEquation

__all__ = [
    "ModelParams",
    "DerivedMemoryParams",
    "RegimeReport",
    "check_regime",
    "apply_nonadiabatic_constraints",
    "apply_memory_constraints",
    "ket_e",
    "ket_g",
    "plus_ket",
    "minus_ket",
    "up_ket",
    "down_ket",
    "tilde_plus_ket",
    "tilde_minus_ket",
    "sigma",
    "drive_generator_1",
    "drive_generator_2",
    "memory_generator",
    "u1_frame",
    "u2_frame",
    "nonadiabatic_frame",
    "memory_frame",
    "dressed_basis_matrix",
    "build_h1",
    "build_h1_memory",
    "build_h2_effective",
    "build_h2_memory",
    "engineered_rate",
    "epsilon_closed_form",
    "reduced_master_equation",
    "dressed_decay_generator",
    "bloch_ode_rhs",
    "asymptotic_state",
    "protected_state_nonadiabatic",
    "protected_state_memory",
    "protected_state_dressed_gauge",
    "drive_interaction_hamiltonian",
    "full_system_master_equation",
]

SIGMA_Z = np.diag([1.0 + 0j, -1.0 + 0j])  # |e><e| - |g><g|


@dataclass(frozen=True)
class ModelParams:
    """Full parameter record of the driven ion-cavity system.

    Angular frequencies and rates are in rad/s and 1/s respectively:
    ``g`` ion-cavity coupling, ``omega1/omega2`` classical drive
    amplitudes with phases ``phi1/phi2``, detunings ``delta_a`` (cavity)
    and ``delta1/delta2`` (drives), ``Gamma`` cavity decay, ``gamma``
    spontaneous emission, ``n_max`` Fock cutoff.

    Defaults put the engineered-to-spontaneous rate ratio at 100 and the
    drive ratio omega2/omega1 at 0.05, with the nonadiabatic resonance
    conditions (delta1 = 0, delta2 = -2 omega1, delta_a = -omega2) built in.
    """

    g: float = 1e5
    omega1: float = 2e7
    omega2: float = 1e6
    phi1: float = 0.0
    phi2: float = 0.0
    delta_a: float = -1e6
    delta1: float = 0.0
    delta2: float = -4e7
    Gamma: float = 1e6
    gamma: float = 1e2
    n_max: int = 2

    def __post_init__(self):
        for name in ("g", "omega1", "omega2", "Gamma", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    @property
    def phi(self) -> float:
        """Relative drive phase phi1 - phi2."""
        return self.phi1 - self.phi2

    def replace(self, **changes) -> "ModelParams":
        return dataclasses.replace(self, **changes)


def apply_nonadiabatic_constraints(p: ModelParams) -> ModelParams:
    """Pin the resonance conditions of the nonadiabatic branch."""
    return p.replace(delta1=0.0, delta2=-2.0 * p.omega1, delta_a=-p.omega2)


def apply_memory_constraints(p: ModelParams) -> ModelParams:
    """Pin the single-drive memory branch: omega2 = 0, delta_a = -2 lambda."""
    q = p.replace(omega2=0.0)
    lam = DerivedMemoryParams.from_params(q).lam
    return q.replace(delta_a=-2.0 * lam)


@dataclass(frozen=True)
class DerivedMemoryParams:
    """Quantities derived from the detuned single drive: splitting ``lam``,
    asymmetry ``chi = delta1/lam`` in [-2, 2], reduced coupling
    ``g_tilde = g (1 - chi/2)`` and engineered rate ``g_tilde^2 / Gamma``."""

    lam: float
    chi: float
    g_tilde: float
    rate: float

    @staticmethod
    def from_params(p: ModelParams) -> "DerivedMemoryParams":
        lam = float(np.hypot(p.omega1, 0.5 * p.delta1))
        if lam == 0.0:
            raise ValueError("omega1 and delta1 cannot both vanish")
        chi = p.delta1 / lam
        g_tilde = p.g * (1.0 - 0.5 * chi)
        if p.Gamma <= 0:
            raise ValueError("Gamma must be positive to derive the engineered rate")
        return DerivedMemoryParams(lam=lam, chi=chi, g_tilde=g_tilde, rate=g_tilde**2 / p.Gamma)


@dataclass(frozen=True)
class RegimeReport:
    """Constraint residuals (rad/s) and hierarchy ratios for one branch."""

    branch: str
    checks: dict
    ratios: dict

    @property
    def ok(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def __str__(self):
        failed = {k: res for k, (ok, res) in self.checks.items() if not ok}
        return f"RegimeReport({self.branch}, failed={failed}, ratios={self.ratios})"


def check_regime(p: ModelParams, branch: str, *, rtol: float = 1e-9) -> RegimeReport:
    """Check the resonance constraints of the requested branch.

    Residuals are absolute (rad/s); a constraint passes when its residual
    is below ``rtol`` times the drive scale of the branch.
    """
    scale = max(p.omega1, p.omega2, abs(p.delta2) / 2.0, abs(p.delta_a), p.g, 1.0)
    if branch == "nonadiabatic":
        checks = {
            "delta1_zero": abs(p.delta1),
            "delta2_minus_two_omega1": abs(p.delta2 + 2.0 * p.omega1),
            "delta_a_minus_omega2": abs(p.delta_a + p.omega2),
        }
    elif branch == "memory":
        lam = DerivedMemoryParams.from_params(p).lam
        checks = {
            "omega2_zero": abs(p.omega2),
            "delta_a_minus_two_lambda": abs(p.delta_a + 2.0 * lam),
        }
    else:
        raise ValueError(f"unknown branch {branch!r}")
    rated = {k: (res <= rtol * scale, res) for k, res in checks.items()}

    def _ratio(a, b):
        return float(a / b) if b != 0 else float("inf")

    ratios = {
        "omega1_over_omega2": _ratio(p.omega1, p.omega2),
        "omega2_over_g": _ratio(p.omega2, p.g),
        "Gamma_over_g": _ratio(p.Gamma, p.g),
        "rate_eng_over_gamma": _ratio(engineered_rate(p, branch), p.gamma)
        if p.Gamma > 0
        else float("inf"),
    }
    return RegimeReport(branch=branch, checks=rated, ratios=ratios)


# --- bases -----------------------------------------------------------------


def ket_e() -> np.ndarray:
    return qmath.basis_ket(2, 0)


def ket_g() -> np.ndarray:
    return qmath.basis_ket(2, 1)


def plus_ket(phi1: float) -> np.ndarray:
    return (ket_e() + np.exp(-1j * phi1) * ket_g()) / np.sqrt(2.0)


def minus_ket(phi1: float) -> np.ndarray:
    return (ket_e() - np.exp(-1j * phi1) * ket_g()) / np.sqrt(2.0)


def up_ket(phi1: float, phi: float) -> np.ndarray:
    return (plus_ket(phi1) + np.exp(-1j * phi) * minus_ket(phi1)) / np.sqrt(2.0)


def down_ket(phi1: float, phi: float) -> np.ndarray:
    return (plus_ket(phi1) - np.exp(-1j * phi) * minus_ket(phi1)) / np.sqrt(2.0)


def tilde_plus_ket(chi: float, phi1: float) -> np.ndarray:
    return (
        np.sqrt(2.0 + chi) * ket_e() + np.exp(-1j * phi1) * np.sqrt(2.0 - chi) * ket_g()
    ) / 2.0


def tilde_minus_ket(chi: float, phi1: float) -> np.ndarray:
    return (
        np.sqrt(2.0 - chi) * ket_e() - np.exp(-1j * phi1) * np.sqrt(2.0 + chi) * ket_g()
    ) / 2.0


def sigma(bra_into, ket_from) -> np.ndarray:
    """Transition operator |bra_into><ket_from|."""
    return np.outer(qmath.as_ket(bra_into), np.conj(qmath.as_ket(ket_from)))


def dressed_basis_matrix(p: ModelParams, branch: str) -> np.ndarray:
    """Columns are the protected-branch basis kets in bare coordinates:
    (up, down) for the nonadiabatic branch, (T+, T-) for the memory one."""
    if branch == "nonadiabatic":
        cols = (up_ket(p.phi1, p.phi), down_ket(p.phi1, p.phi))
    elif branch == "memory":
        chi = DerivedMemoryParams.from_params(p).chi
        cols = (tilde_plus_ket(chi, p.phi1), tilde_minus_ket(chi, p.phi1))
    else:
        raise ValueError(f"unknown branch {branch!r}")
    return np.column_stack(cols)


# --- frames ----------------------------------------------------------------


def drive_generator_1(p: ModelParams) -> np.ndarray:
    """omega1 (e^{i phi1} |e><g| + h.c.); eigenkets |+->, eigenvalues +-omega1."""
    a = p.omega1 * np.exp(1j * p.phi1) * sigma(ket_e(), ket_g())
    return a + qmath.dag(a)


def drive_generator_2(p: ModelParams) -> np.ndarray:
    """omega2/2 (e^{i phi} |+><-| + h.c.); eigenkets |up/down>, eigenvalues +-omega2/2."""
    a = 0.5 * p.omega2 * np.exp(1j * p.phi) * sigma(plus_ket(p.phi1), minus_ket(p.phi1))
    return a + qmath.dag(a)


def memory_generator(p: ModelParams) -> np.ndarray:
    """delta1 sigma_z / 2 + omega1 (e^{i phi1}|e><g| + h.c.); eigenkets |T+->,
    eigenvalues +-lambda."""
    return 0.5 * p.delta1 * SIGMA_Z + drive_generator_1(p)


def u1_frame(p: ModelParams) -> FrameTransform:
    return FrameTransform.from_static_generator(drive_generator_1(p))


def u2_frame(p: ModelParams) -> FrameTransform:
    return FrameTransform.from_static_generator(drive_generator_2(p))


def nonadiabatic_frame(p: ModelParams) -> FrameTransform:
    """R(t) = U1(t) U2(t); maps doubly dressed frame states into the
    interaction picture.  The protected trajectory is R(t)|up>."""
    return compose_frames(u1_frame(p), u2_frame(p))


def memory_frame(p: ModelParams) -> FrameTransform:
    """R(t) = exp(-i delta1 sigma_z t / 2) exp(-i K t) with K the detuned
    drive generator; maps the memory dressed frame into the interaction
    picture.  The protected trajectory is R(t)|T+>."""
    return compose_frames(
        FrameTransform.from_static_generator(0.5 * p.delta1 * SIGMA_Z),
        FrameTransform.from_static_generator(memory_generator(p)),
    )


# --- Hamiltonians ----------------------------------------------------------


def build_h1(p: ModelParams, t: float) -> np.ndarray:
    """Interaction-picture Hamiltonian of the driven ion-cavity system:

    ``[g e^{-i delta_a t} a + omega1 e^{i(phi1 - delta1 t)}
    + omega2 e^{i(phi2 - delta2 t)}] |e><g| + h.c.``

    Valid for any parameters; resonance constraints are only required by
    the effective builders.
    """
    a = qmath.fock_annihilation(p.n_max)
    eye_f = np.eye(p.n_max + 1)
    seg = sigma(ket_e(), ket_g())
    drive = p.omega1 * np.exp(1j * (p.phi1 - p.delta1 * t)) + p.omega2 * np.exp(
        1j * (p.phi2 - p.delta2 * t)
    )
    upper = p.g * np.exp(-1j * p.delta_a * t) * np.kron(seg, a) + drive * np.kron(seg, eye_f)
    return upper + qmath.dag(upper)


def build_h1_memory(p: ModelParams, t: float) -> np.ndarray:
    """Single-drive Hamiltonian in the frame where the detuned drive is
    static: ``delta1 sigma_z/2 + omega1 (e^{i phi1}|e><g| + h.c.)
    + (g e^{-i delta_a t} a |e><g| + h.c.)``."""
    a = qmath.fock_annihilation(p.n_max)
    eye_f = np.eye(p.n_max + 1)
    upper = p.g * np.exp(-1j * p.delta_a * t) * np.kron(sigma(ket_e(), ket_g()), a)
    return np.kron(memory_generator(p), eye_f) + upper + qmath.dag(upper)


def _raising_block(coupling: float, phi1: float, n_max: int) -> np.ndarray:
    # (coupling) e^{i phi1} a^dag |0><1| + h.c. in a two-level (protected,
    # pumped) basis tensor Fock
    a = qmath.fock_annihilation(n_max)
    upper = coupling * np.exp(1j * phi1) * np.kron(
        sigma(qmath.basis_ket(2, 0), qmath.basis_ket(2, 1)), qmath.dag(a)
    )
    return upper + qmath.dag(upper)


def build_h2_effective(p: ModelParams) -> np.ndarray:
    """Engineered coupling ``(g/2)(e^{i phi1} a^dag |up><down| + h.c.)``,
    written in the (up, down) x Fock product basis.

    Requires the nonadiabatic resonance constraints; violations raise
    :class:`RegimeError` carrying the report.
    """
    report = check_regime(p, "nonadiabatic")
    if not report.ok:
        raise RegimeError(report)
    return _raising_block(0.5 * p.g, p.phi1, p.n_max)


def build_h2_memory(p: ModelParams) -> np.ndarray:
    """Engineered memory coupling ``(g_tilde/2)(e^{i phi1} a^dag |T+><T-|
    + h.c.)`` in the (T+, T-) x Fock basis, with g_tilde = g (1 - chi/2)."""
    report = check_regime(p, "memory")
    if not report.ok:
        raise RegimeError(report)
    gt = DerivedMemoryParams.from_params(p).g_tilde
    return _raising_block(0.5 * gt, p.phi1, p.n_max)


# --- engineered reservoir, closed forms -------------------------------------


def engineered_rate(p: ModelParams, branch: str = "nonadiabatic") -> float:
    """Effective pump rate of the engineered reservoir: g^2/Gamma for the
    nonadiabatic branch, g_tilde^2/Gamma for the memory branch."""
    if p.Gamma <= 0:
        raise ValueError("Gamma must be positive")
    if branch == "nonadiabatic":
        return p.g**2 / p.Gamma
    if branch == "memory":
        return DerivedMemoryParams.from_params(p).rate
    raise ValueError(f"unknown branch {branch!r}")


def epsilon_closed_form(ratio: float, branch: str = "nonadiabatic") -> float:
    """Residual population of the pumped state at the engineered fixed point,
    as a function of the rate ratio (engineered rate / gamma):
    ``[2 + (8/3) ratio]^-1`` (nonadiabatic) or ``[2 + ratio]^-1`` (memory)."""
    if ratio < 0:
        raise ValueError("ratio must be >= 0")
    if branch == "nonadiabatic":
        return 1.0 / (2.0 + (8.0 / 3.0) * ratio)
    if branch == "memory":
        return 1.0 / (2.0 + ratio)
    raise ValueError(f"unknown branch {branch!r}")


def dressed_decay_generator(gamma: float) -> np.ndarray:
    """Constant generator of the dressed-basis spontaneous-emission rate
    equations used by the reduced model (basis order (up, down)):

        d rho_uu/dt = 3 gamma/8 - (3 gamma/2) rho_uu
        d rho_ud/dt = -(5 gamma/4) rho_ud + (gamma/8) rho_du

    The constant term is folded onto the trace-one subspace via
    ``rho_uu + rho_dd = 1``, which makes the generator linear (and exactly
    trace- and Hermiticity-preserving) so the engine can integrate it.
    This system is not of Lindblad form; it is kept as stated so that the
    frame-averaging oracle, which derives its own coefficients
    independently, can be compared against it coefficient by coefficient.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    gen = np.zeros((4, 4), dtype=complex)
    # vec order (column stacking, basis (up, down)): [uu, du, ud, dd]
    gen[0, 0] = -9.0 * gamma / 8.0
    gen[0, 3] = 3.0 * gamma / 8.0
    gen[3, 0] = 9.0 * gamma / 8.0
    gen[3, 3] = -3.0 * gamma / 8.0
    gen[1, 1] = -5.0 * gamma / 4.0
    gen[1, 2] = gamma / 8.0
    gen[2, 2] = -5.0 * gamma / 4.0
    gen[2, 1] = gamma / 8.0
    return gen


def reduced_master_equation(
    p: ModelParams, branch: str = "nonadiabatic", include_gamma: bool = False
) -> MasterEquation:
    """Two-level master equation obtained after adiabatic elimination of the
    lossy cavity mode, written in the protected basis of the branch.

    The jump operator |protected><pumped| carries the engineered rate as a
    population transfer rate (factor 1/2 convention), which is what the
    eliminated two-part model and the dressed rate equations both give.
    With ``include_gamma`` the dressed spontaneous-emission rate equations
    are added as an extra generator (nonadiabatic branch only; no closed
    rate system is defined for the memory branch).
    """
    rate = engineered_rate(p, branch)
    jump = sigma(qmath.basis_ket(2, 0), qmath.basis_ket(2, 1))
    extra = None
    if include_gamma:
        if branch != "nonadiabatic":
            raise ValueError("include_gamma is only defined for the nonadiabatic branch")
        extra = dressed_decay_generator(p.gamma)
    return MasterEquation(
        dim=2,
        hamiltonian=None,
        terms=(LindbladTerm(rate=rate, operator=jump, factor=0.5),),
        extra_generator=extra,
    )


def bloch_ode_rhs(state, rate_eng: float, gamma: float) -> np.ndarray:
    """Closed dressed-basis rate equations for
    ``(rho_uu, rho_dd, rho_ud, rho_du)``:

        d rho_uu/dt = (rate + 3 gamma/8) - (rate + 6 gamma/4) rho_uu
        d rho_dd/dt = -d rho_uu/dt
        d rho_ud/dt = -(rate/2 + 5 gamma/4) rho_ud + (gamma/8) rho_du
        d rho_du/dt = conj(d rho_ud/dt)

    Inputs must satisfy ``rho_uu + rho_dd = 1`` and ``rho_du =
    conj(rho_ud)``.
    """
    s = np.asarray(state, dtype=complex)
    if s.shape != (4,):
        raise ValueError("state must have four components (uu, dd, ud, du)")
    uu, dd, ud, du = s
    if abs((uu + dd) - 1.0) > 1e-9:
        raise ValueError(f"populations must sum to 1, got {uu + dd}")
    if abs(du - np.conj(ud)) > 1e-9:
        raise ValueError("rho_du must be the conjugate of rho_ud")
    duu = (rate_eng + 3.0 * gamma / 8.0) - (rate_eng + 6.0 * gamma / 4.0) * uu
    dud = -(rate_eng / 2.0 + 5.0 * gamma / 4.0) * ud + (gamma / 8.0) * du
    return np.array([duu, -duu, dud, np.conj(dud)])


def asymptotic_state(branch: str, epsilon: float) -> np.ndarray:
    """Asymptotic reduced state in the protected basis.

    Nonadiabatic: ``diag(1 - eps, eps)``.  Memory: the same diagonal plus
    symmetric off-diagonal terms ``eps (1 - eps)^-1``; parameter sets
    breaking positivity (``(1 - eps)^3 < eps``) are rejected rather than
    repaired.
    """
    if branch == "nonadiabatic":
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
        return np.diag([1.0 - epsilon, epsilon]).astype(complex)
    if branch == "memory":
        if not 0.0 <= epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
        if (1.0 - epsilon) ** 3 < epsilon:
            raise ValueError(
                f"off-diagonal coefficient breaks positivity for epsilon = {epsilon}"
            )
        off = epsilon / (1.0 - epsilon)
        return np.array([[1.0 - epsilon, off], [off, epsilon]], dtype=complex)
    raise ValueError(f"unknown branch {branch!r}")


# --- protected states --------------------------------------------------------


def protected_state_nonadiabatic(p: ModelParams, t: float) -> np.ndarray:
    """Protected trajectory of the nonadiabatic branch in the bare basis:

    ``cos(phi/2 - omega1 t)|e> + i e^{-i phi1} sin(phi/2 - omega1 t)|g>``.

    This is the instantaneous null eigenvector of the frame-transformed
    jump operator (the ray R(t)|up> with the global dynamical phase
    removed).
    """
    theta = 0.5 * p.phi - p.omega1 * t
    return np.array(
        [np.cos(theta), 1j * np.exp(-1j * p.phi1) * np.sin(theta)], dtype=complex
    )


def protected_state_dressed_gauge(p: ModelParams, t: float) -> np.ndarray:
    """The same protected ray written in the drive-dressed gauge,
    ``[|+> + e^{-i(phi - 2 omega1 t)}|->]/sqrt(2)``; the gauge in which the
    interferometric phase (omega1 + omega2/2) t is defined."""
    return (
        plus_ket(p.phi1)
        + np.exp(-1j * (p.phi - 2.0 * p.omega1 * t)) * minus_ket(p.phi1)
    ) / np.sqrt(2.0)


def protected_state_memory(p: ModelParams, t: float) -> np.ndarray:
    """Protected stationary-superposition trajectory of the memory branch:

    ``[sqrt(2 + chi)|e> + e^{-i(phi1 - delta1 t)} sqrt(2 - chi)|g>]/2``.
    """
    chi = DerivedMemoryParams.from_params(p).chi
    return np.array(
        [
            0.5 * np.sqrt(2.0 + chi),
            0.5 * np.exp(-1j * (p.phi1 - p.delta1 * t)) * np.sqrt(2.0 - chi),
        ],
        dtype=complex,
    )


def drive_interaction_hamiltonian(p: ModelParams, t: float) -> np.ndarray:
    """Drive Hamiltonian governing the protected trajectory in the
    interaction picture (bare basis):

    ``omega1 (|+><+| - |-><-|) + omega2/2 [e^{i(phi - 2 omega1 t)}|+><-|
    + h.c.]``.

    Equal to ``i dR/dt R^dag`` for the composed frame R = U1 U2.
    """
    pk, mk = plus_ket(p.phi1), minus_ket(p.phi1)
    upper = 0.5 * p.omega2 * np.exp(1j * (p.phi - 2.0 * p.omega1 * t)) * sigma(pk, mk)
    return p.omega1 * (qmath.projector(pk) - qmath.projector(mk)) + upper + qmath.dag(upper)


# --- full two-part model ------------------------------------------------------


def full_system_master_equation(
    p: ModelParams,
    branch: str = "nonadiabatic",
    *,
    frame: str = "dressed-effective",
    include_gamma: bool = False,
) -> MasterEquation:
    """Master equation of the two-level system plus lossy cavity mode.

    ``frame="dressed-effective"``: static engineered Hamiltonian (H2 form)
    in the protected basis, cavity decay at rate Gamma (factor 1/2), and
    optionally the spontaneous-emission channel conjugated into the
    rotating dressed frame (a time-dependent jump sampler).

    ``frame="bare"``: the full interaction-picture Hamiltonian sampler
    with static jump operators.
    """
    a = qmath.fock_annihilation(p.n_max)
    eye_f = np.eye(p.n_max + 1)
    dim = 2 * (p.n_max + 1)
    cavity = LindbladTerm(rate=p.Gamma, operator=np.kron(np.eye(2), a), factor=0.5)

    if frame == "bare":
        if branch == "nonadiabatic":
            hamiltonian = lambda t: build_h1(p, t)  # noqa: E731
        elif branch == "memory":
            hamiltonian = lambda t: build_h1_memory(p, t)  # noqa: E731
        else:
            raise ValueError(f"unknown branch {branch!r}")
        terms = [cavity]
        if include_gamma:
            terms.append(
                LindbladTerm(
                    rate=p.gamma,
                    operator=np.kron(sigma(ket_g(), ket_e()), eye_f),
                    factor=0.5,
                )
            )
        return MasterEquation(dim=dim, hamiltonian=hamiltonian, terms=tuple(terms))

    if frame != "dressed-effective":
        raise ValueError(f"unknown frame {frame!r}")

    h2 = build_h2_effective(p) if branch == "nonadiabatic" else build_h2_memory(p)
    terms = [cavity]
    if include_gamma:
        r = nonadiabatic_frame(p) if branch == "nonadiabatic" else memory_frame(p)
        w = dressed_basis_matrix(p, branch)
        s_ge = sigma(ket_g(), ket_e())

        def dressed_jump(t: float) -> np.ndarray:
            rt = r.sampler(t)
            # bare-frame jump conjugated into the dressed frame, then
            # re-expressed in dressed coordinates
            o = qmath.dag(w) @ (qmath.dag(rt) @ s_ge @ rt) @ w
            return np.kron(o, eye_f)

        terms.append(LindbladTerm(rate=p.gamma, operator=dressed_jump, factor=0.5))
    return MasterEquation(dim=dim, hamiltonian=h2, terms=tuple(terms))
