import numpy as np
import pytest

from reslab import qmath
from reslab.errors import IntegrationDivergenceError, NotHermitianError
from reslab.lindblad import (
    LindbladTerm,
    MasterEquation,
    apply_generator,
    dissipator_matrix,
    evolve,
    liouvillian_matrix,
    residual,
    steady_state,
    unvec,
    vec,
)

SIGMA_GE = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|, basis (e, g)


def decay_qubit(gamma):
    """Spontaneous decay at population rate gamma (rate gamma/2, factor 1)."""
    return MasterEquation(dim=2, terms=(LindbladTerm(rate=gamma / 2, operator=SIGMA_GE, factor=1.0),))


def random_master_equation(rng, dim):
    h = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = h + h.conj().T
    ops = []
    for _ in range(2):
        o = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        ops.append(LindbladTerm(rate=rng.uniform(0.1, 2.0), operator=o, factor=0.5))
    return MasterEquation(dim=dim, hamiltonian=h, terms=tuple(ops))


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


class TestVectorization:
    def test_column_stacking(self):
        rho = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=complex)
        assert np.array_equal(vec(rho), np.array([1.0, 3.0, 2.0, 4.0], dtype=complex))
        assert np.array_equal(unvec(vec(rho), 2), rho)

    def test_product_identity(self):
        rng = np.random.default_rng(0)
        a, b, r = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
        lhs = np.kron(b.T, a) @ vec(r)
        assert np.max(np.abs(lhs - vec(a @ r @ b))) < 1e-12


class TestLiouvillian:
    def test_closed_system_form(self):
        rng = np.random.default_rng(1)
        h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        h = h + h.conj().T
        me = MasterEquation(dim=3, hamiltonian=h, terms=(LindbladTerm(0.0, np.eye(3), 1.0),))
        expected = -1j * (np.kron(np.eye(3), h) - np.kron(h.T, np.eye(3)))
        assert np.max(np.abs(liouvillian_matrix(me) - expected)) < 1e-14

    def test_decay_rate_by_hand(self):
        gamma = 0.7
        me = decay_qubit(gamma)
        rhodot = unvec(liouvillian_matrix(me) @ vec(np.diag([1.0, 0.0])), 2)
        # excited population decays at rate gamma, ground grows to match
        assert rhodot[0, 0] == pytest.approx(-gamma)
        assert rhodot[1, 1] == pytest.approx(gamma)
        # hand-built superoperator, column-stacking convention
        odo = qmath.dag(SIGMA_GE) @ SIGMA_GE
        hand = (gamma / 2) * (
            2 * np.kron(SIGMA_GE.conj(), SIGMA_GE)
            - np.kron(np.eye(2), odo)
            - np.kron(odo.T, np.eye(2))
        )
        assert np.max(np.abs(liouvillian_matrix(me) - hand)) < 1e-14

    def test_trace_preservation(self):
        rng = np.random.default_rng(2)
        for dim in (2, 3):
            me = random_master_equation(rng, dim)
            L = liouvillian_matrix(me)
            for _ in range(5):
                rho = random_density(rng, dim)
                assert abs(np.trace(unvec(L @ vec(rho), dim))) < 1e-12

    def test_superoperator_matches_direct_rhs(self):
        rng = np.random.default_rng(3)
        for dim in (2, 4):
            me = random_master_equation(rng, dim)
            L = liouvillian_matrix(me)
            for _ in range(5):
                rho = random_density(rng, dim)
                direct = apply_generator(me, rho)
                assert np.max(np.abs(unvec(L @ vec(rho), dim) - direct)) < 1e-12

    def test_rejects_non_hermitian_hamiltonian(self):
        me = MasterEquation(dim=2, hamiltonian=np.array([[0.0, 1.0], [0.0, 0.0]]))
        with pytest.raises(NotHermitianError):
            liouvillian_matrix(me)


class TestEvolve:
    def test_exponential_decay(self):
        gamma = 1.3
        me = decay_qubit(gamma)
        times = np.linspace(0.0, 4.0 / gamma, 21)
        traj = evolve(me, np.diag([1.0, 0.0 + 0j]), times)
        pops = np.array([np.real(s[0, 0]) for s in traj.states])
        assert np.max(np.abs(pops - np.exp(-gamma * times))) < 1e-7

    def test_closed_static(self):
        me = MasterEquation(dim=2, hamiltonian=np.zeros((2, 2)))
        rho0 = qmath.projector(qmath.normalized([1.0, 1.0]))
        traj = evolve(me, rho0, np.linspace(0.0, 5.0, 6))
        for s in traj.states:
            assert np.max(np.abs(s - rho0)) < 1e-12

    def test_engineered_pump_relaxation(self):
        # pump |down> -> |up> at population rate R; rho_uu = 1 - exp(-R t)
        rate = 0.9
        jump = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
        me = MasterEquation(dim=2, terms=(LindbladTerm(rate=rate, operator=jump, factor=0.5),))
        times = np.linspace(0.0, 3.0 / rate, 16)
        traj = evolve(me, np.diag([0.0, 1.0 + 0j]), times)
        uu = np.array([np.real(s[0, 0]) for s in traj.states])
        assert np.max(np.abs(uu - (1.0 - np.exp(-rate * times)))) < 1e-6

    def test_time_dependent_commuting_oracle(self):
        # H(t) = (A/2) cos(nu t) sigma_z: coherence phase exp(-i A sin(nu t)/nu)
        amp, nu = 2.0, 3.0
        me = MasterEquation(
            dim=2, hamiltonian=lambda t: 0.5 * amp * np.cos(nu * t) * np.diag([1.0, -1.0 + 0j])
        )
        rho0 = qmath.projector(qmath.normalized([1.0, 1.0]))
        times = np.linspace(0.0, 2.0, 9)
        traj = evolve(me, rho0, times)
        for t, s in zip(times, traj.states):
            expected = 0.5 * np.exp(-1j * amp * np.sin(nu * t) / nu)
            assert abs(s[0, 1] - expected) < 1e-7

    def test_grid_validation(self):
        me = decay_qubit(1.0)
        rho0 = np.diag([1.0, 0.0 + 0j])
        with pytest.raises(ValueError):
            evolve(me, rho0, [1.0, 2.0])
        with pytest.raises(ValueError):
            evolve(me, rho0, [0.0, 2.0, 1.0])
        with pytest.raises(ValueError):
            evolve(me, np.diag([0.9, 0.0 + 0j]), [0.0, 1.0])

    def test_divergence_error_carries_residual(self):
        me = decay_qubit(1.0)
        with pytest.raises(IntegrationDivergenceError) as err:
            evolve(me, np.diag([1.0, 0.0 + 0j]), [0.0, 1.0], tol=1e-30, max_refinements=2)
        assert np.isfinite(err.value.achieved) and err.value.achieved > 1e-30

    def test_trajectory_state_invariants(self):
        rng = np.random.default_rng(4)
        me = random_master_equation(rng, 3)
        traj = evolve(me, random_density(rng, 3), np.linspace(0.0, 2.0, 11))
        for s in traj.states:
            assert abs(np.trace(s) - 1.0) < 1e-9
            assert qmath.hermitian_defect(s) < 1e-9
            assert np.min(np.linalg.eigvalsh(0.5 * (s + qmath.dag(s)))) > -1e-7


class TestSteadyState:
    def test_decay_only(self):
        rho = steady_state(decay_qubit(0.8))
        assert qmath.trace_distance(rho, np.diag([0.0, 1.0])) < 1e-12

    def test_residual_contract(self):
        me = decay_qubit(2.0)
        rho, info = steady_state(me, return_info=True)
        assert info.residual <= 1e-9
        assert residual(me, rho) < 1e-9

    def test_degenerate_null_space(self):
        me = MasterEquation(dim=2, hamiltonian=np.diag([1.0, -1.0 + 0j]))
        rho, info = steady_state(me, return_info=True)
        assert info.degenerate and info.null_dimension == 2
        assert np.max(np.abs(rho - np.eye(2) / 2)) < 1e-12

    def test_long_time_agreement(self):
        # slowest relaxation mode is the coherence at gamma/2; by t = 20/(gamma/2)
        # the trajectory parks on the fixed point
        gamma = 0.5
        me = decay_qubit(gamma)
        rho0 = qmath.projector(qmath.normalized([1.0, 1.0j]))
        traj = evolve(me, rho0, np.linspace(0.0, 40.0 / gamma, 11))
        assert qmath.trace_distance(traj.final, steady_state(me)) < 1e-5


class TestResidual:
    def test_decay_magnitude(self):
        gamma = 1.7
        assert residual(decay_qubit(gamma), np.diag([1.0, 0.0])) == pytest.approx(
            gamma * np.sqrt(2.0)
        )

    def test_closed_eigenstate(self):
        me = MasterEquation(dim=2, hamiltonian=np.diag([1.0, -1.0 + 0j]))
        assert residual(me, np.diag([1.0, 0.0])) < 1e-12

    def test_zero_rate_terms_ignored(self):
        me = MasterEquation(
            dim=2,
            hamiltonian=np.zeros((2, 2)),
            terms=(LindbladTerm(rate=0.0, operator=SIGMA_GE, factor=1.0),),
        )
        assert residual(me, np.eye(2) / 2) == 0.0


class TestLindbladTermValidation:
    def test_negative_rate(self):
        with pytest.raises(ValueError):
            LindbladTerm(rate=-1.0, operator=SIGMA_GE)

    def test_factor_restricted(self):
        with pytest.raises(ValueError):
            LindbladTerm(rate=1.0, operator=SIGMA_GE, factor=0.25)

    def test_dissipator_factor_scaling(self):
        d_half = dissipator_matrix(SIGMA_GE, 1.0, 0.5)
        d_full = dissipator_matrix(SIGMA_GE, 1.0, 1.0)
        assert np.max(np.abs(2.0 * d_half - d_full)) < 1e-14
