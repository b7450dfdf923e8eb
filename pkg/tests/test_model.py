"""Chain geometry, bond terms, Trotter schedules, initial states."""

import numpy as np
import pytest
import scipy.linalg

from spinbattery.errors import PreparationError
from spinbattery.model import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    ChainSpec,
    IsolatedChainSpec,
    SystemPrep,
    bond_hamiltonian,
    initial_state,
    trotter_schedule,
)
from spinbattery.mps import MatrixProductState, expect_one_site, from_product_state, overlap
from spinbattery.oracle import dense_hamiltonian, dense_from_mps


class TestChainSpec:
    def test_geometry(self):
        spec = ChainSpec(N=4, N_b=6, J=1.0, Jz=0.5)
        assert spec.total_length == 16
        assert spec.system_start == 6
        assert spec.system_stop == 10
        assert spec.left_junction_bond == 5
        assert spec.right_junction_bond == 9

    def test_bond_parameters_zone_map(self):
        spec = ChainSpec(N=3, N_b=3, J=2.0, Jz=0.7)
        # leads and junctions carry no ZZ term; only system-interior bonds do
        expected_jz = {0: 0.0, 1: 0.0, 2: 0.0, 3: 0.7, 4: 0.7, 5: 0.0, 6: 0.0, 7: 0.0}
        for k, jz in expected_jz.items():
            j, jz_k = spec.bond_parameters(k)
            assert jz_k == jz
            assert j == 2.0

    def test_junction_override(self):
        spec = ChainSpec(N=2, N_b=2, J=1.0, Jz=1.0, junction_coupling=0.25)
        assert spec.bond_parameters(spec.left_junction_bond) == (0.25, 0.0)
        assert spec.bond_parameters(spec.right_junction_bond) == (0.25, 0.0)
        assert spec.bond_parameters(2) == (1.0, 1.0)

    def test_lead_rule_enforced(self):
        with pytest.raises(ValueError, match="N_b"):
            ChainSpec(N=4, N_b=3)

    def test_bond_range(self):
        spec = ChainSpec(N=2, N_b=2)
        with pytest.raises(ValueError):
            spec.bond_parameters(5)


class TestBondHamiltonian:
    def test_lead_bond_eigenvalues(self):
        # oracle: direct 4x4 diagonalization; XX bond spectrum {0, 0, 2J, -2J}
        spec = ChainSpec(N=2, N_b=2, J=1.3, Jz=0.9)
        h = bond_hamiltonian(spec, 0)
        evals = np.sort(np.linalg.eigvalsh(h))
        assert np.allclose(evals, [-2.6, 0.0, 0.0, 2.6], atol=1e-12)

    def test_system_bond_matrix_elements(self):
        spec = ChainSpec(N=2, N_b=2, J=1.0, Jz=1.0)
        h = bond_hamiltonian(spec, 2)  # the single system-interior bond
        # basis order |00>,|01>,|10>,|11> with 0 = up
        assert h[1, 2] == pytest.approx(2.0)  # <01|h|10> = 2J (spin exchange)
        assert h[0, 0] == pytest.approx(1.0)  # <up,up|h|up,up> = Jz
        assert np.linalg.norm(h - h.conj().T) < 1e-14

    def test_commutes_with_total_z(self):
        spec = ChainSpec(N=3, N_b=3, J=0.8, Jz=1.2)
        ztot = np.kron(PAULI_Z, np.eye(2)) + np.kron(np.eye(2), PAULI_Z)
        for k in range(spec.n_bonds()):
            h = bond_hamiltonian(spec, k)
            assert np.linalg.norm(h @ ztot - ztot @ h) < 1e-12


class TestTrotterSchedule:
    def test_dt_zero_is_identity(self):
        spec = IsolatedChainSpec(4, 1.0, 0.5)
        sched = trotter_schedule(spec, 0.0)
        for layer in sched.layers:
            for g in layer.gates:
                assert np.allclose(g, np.eye(4), atol=1e-14)

    def test_single_bond_is_exact(self):
        # oracle: dense matrix exponential of the lone bond term
        spec = IsolatedChainSpec(2, 1.0, 0.8)
        dt = 0.37
        sched = trotter_schedule(spec, dt)
        total = np.eye(4, dtype=complex)
        for bond, gate in sched.stages:
            assert bond == 0
            total = gate @ total
        exact = scipy.linalg.expm(-1j * dt * bond_hamiltonian(spec, 0))
        assert np.max(np.abs(total - exact)) < 1e-12

    def test_palindromic(self):
        spec = IsolatedChainSpec(6, 1.0, 0.5)
        for order, scheme in ((2, "suzuki"), (4, "suzuki"), (4, "triple-jump")):
            assert trotter_schedule(spec, 0.1, order=order, scheme=scheme).is_palindromic()

    @pytest.mark.parametrize("scheme", ["suzuki", "triple-jump"])
    def test_per_step_error_order(self, scheme):
        # oracle: dense exp(-i H dt); per-step error should scale as dt^5,
        # so halving dt shrinks it by about 2^5 = 32
        rng = np.random.default_rng(71)
        spec = IsolatedChainSpec(6, 1.0, 0.83)
        h = dense_hamiltonian(spec)
        v = rng.standard_normal(64) + 1j * rng.standard_normal(64)
        v /= np.linalg.norm(v)
        errs = []
        for dt in (0.2, 0.1):
            exact = scipy.linalg.expm(-1j * dt * h) @ v
            state = v.copy()
            sched = trotter_schedule(spec, dt, order=4, scheme=scheme)
            from spinbattery.oracle import DenseState, apply_schedule

            out = apply_schedule(sched, DenseState(state, 6))
            errs.append(np.linalg.norm(out.amplitudes - exact))
        ratio = errs[0] / errs[1]
        assert 20.0 < ratio < 45.0

    def test_gates_are_unitary(self):
        spec = ChainSpec(N=4, N_b=4, J=1.0, Jz=1.5)
        sched = trotter_schedule(spec, 0.1)
        for _, g in sched.stages:
            assert np.linalg.norm(g.conj().T @ g - np.eye(4)) < 1e-10

    def test_schedule_conserves_total_z(self):
        # every gate commutes with Z x I + I x Z
        spec = ChainSpec(N=3, N_b=3, J=1.0, Jz=1.1)
        ztot = np.kron(PAULI_Z, np.eye(2)) + np.kron(np.eye(2), PAULI_Z)
        for _, g in trotter_schedule(spec, 0.13).stages:
            assert np.linalg.norm(g @ ztot - ztot @ g) < 1e-10


class TestInitialState:
    def test_neel_bits_pattern(self):
        spec = ChainSpec(N=2, N_b=2, J=1.0, Jz=0.5)
        psi = initial_state(spec, SystemPrep.EXPLICIT_BITS, bits=[1, 0])
        expected = [1, 1, 1, -1, -1, -1]
        for i, z in enumerate(expected):
            assert expect_one_site(psi, PAULI_Z, i) == pytest.approx(z, abs=1e-12)

    def test_ghz_profile(self):
        spec = ChainSpec(N=3, N_b=3, J=1.0, Jz=1.0)
        psi = initial_state(spec, SystemPrep.GHZ)
        for i in range(3):
            assert expect_one_site(psi, PAULI_Z, i) == pytest.approx(1.0, abs=1e-12)
        for i in range(3, 6):
            assert expect_one_site(psi, PAULI_Z, i) == pytest.approx(0.0, abs=1e-12)
        for i in range(6, 9):
            assert expect_one_site(psi, PAULI_Z, i) == pytest.approx(-1.0, abs=1e-12)
        assert abs(overlap(psi, psi) - 1.0) < 1e-12

    def test_ground_prep_n2_is_singlet(self):
        # oracle: 2-site analytic ground state (|01> - |10>)/sqrt(2)
        spec = ChainSpec(N=2, N_b=2, J=1.0, Jz=1.0)
        psi = initial_state(spec, SystemPrep.GROUND)
        assert psi.max_bond_dimension() <= 2
        # bond crossing the junction stays trivial
        assert psi.tensors[1].shape[2] == 1
        vec = dense_from_mps(psi).amplitudes
        singlet = np.zeros(4, dtype=complex)
        singlet[1] = 1 / np.sqrt(2)
        singlet[2] = -1 / np.sqrt(2)
        lead_up = np.zeros(4); lead_up[0] = 1.0
        lead_down = np.zeros(4); lead_down[3] = 1.0
        expected = np.kron(np.kron(lead_up, singlet), lead_down)
        assert abs(abs(np.vdot(expected, vec)) - 1.0) < 1e-10

    def test_nonzero_magnetization_ground_state_rejected(self):
        spec = ChainSpec(N=2, N_b=2, J=1.0, Jz=0.5)
        bad = from_product_state([1, 1])  # pretend ground state, <sum Z> = 2
        with pytest.raises(PreparationError, match="magnetization"):
            initial_state(spec, SystemPrep.GROUND, ground_state=bad)

    def test_neel_prep_requires_even_system(self):
        spec = ChainSpec(N=3, N_b=3)
        with pytest.raises(PreparationError):
            initial_state(spec, SystemPrep.NEEL)

    def test_total_magnetization_zero(self):
        spec = ChainSpec(N=4, N_b=4, J=1.0, Jz=0.5)
        psi = initial_state(spec, SystemPrep.GROUND)
        total = sum(expect_one_site(psi, PAULI_Z, i) for i in range(12))
        assert abs(total) < 1e-8
