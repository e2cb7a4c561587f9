"""Cooling driver: measurement model, sign-operator modes, trajectories.

Oracles: Born-rule frequencies against exact squared amplitudes, the
closed-form two-coupling toy model, and signed-shift reconstruction of the
coherent branches.
"""

import numpy as np
import pytest

from dyncool.cooling import (
    CoolingConfig,
    StoppingRule,
    build_hsign,
    coherent_step,
    cooling_step,
    prepare_joint,
    qpe_project,
    query_costs,
    random_initial_state,
    register_populations,
    run,
)
from dyncool.dyson import default_time, sample_gue
from dyncool.errors import RangeError, ValidationError
from dyncool.operators import HermitianOperator, eig, evolve, spectral_norm
from dyncool.signfun import apply_spectral, fourier_sign

from conftest import random_hermitian


def normalized_gue(rng, dim):
    A = sample_gue(rng, dim)
    return A / max(1.0, spectral_norm(A))


def toy_instance():
    """Four levels one bin apart, couplings only between non-adjacent pairs
    (separation two bins), so every allowed transition sits safely outside
    the sign transition band."""
    H = HermitianOperator(np.diag([-0.75, -0.25, 0.25, 0.75]))
    A = np.zeros((4, 4), dtype=complex)
    A[0, 2] = A[2, 0] = 1.0
    A[1, 3] = A[3, 1] = 1.0
    return H, A


class TestConfig:
    def test_delta_defaults_to_inverse_steps(self):
        cfg = CoolingConfig(epsilon=0.25, steps=8)
        assert cfg.delta == pytest.approx(0.125)
        assert cfg.time == pytest.approx(default_time(0.125))

    def test_validation(self):
        with pytest.raises(RangeError):
            CoolingConfig(epsilon=0.9, steps=4)
        with pytest.raises(ValidationError):
            CoolingConfig(epsilon=0.2, steps=0)
        with pytest.raises(RangeError):
            CoolingConfig(epsilon=0.2, steps=4, delta=1.5)
        with pytest.raises(ValidationError):
            CoolingConfig(epsilon=0.2, steps=4, mode="magic")


class TestQpeProject:
    def test_collapse_lands_in_one_bin(self):
        rng = np.random.default_rng(3)
        H = random_hermitian(rng, 8, norm=1.0)
        dec = eig(H)
        state = random_initial_state(rng, 8)
        bin_idx, energy, collapsed = qpe_project(dec, state, 0.25, rng)
        assert abs(np.linalg.norm(collapsed) - 1.0) <= 1e-12
        amps = dec.eigenvectors.conj().T @ collapsed
        bins = np.floor(dec.eigenvalues / 0.25 + 0.5).astype(int)
        off_bin = np.sum(np.abs(amps[bins != bin_idx]) ** 2)
        assert off_bin <= 1e-20
        assert energy == pytest.approx(np.clip(bin_idx * 0.25, -1, 1))

    def test_born_rule_frequencies(self):
        rng = np.random.default_rng(7)
        lam = np.array([-0.6, -0.1, 0.4])
        dec = eig(HermitianOperator(np.diag(lam)))
        state = np.sqrt(np.array([0.5, 0.3, 0.2])).astype(complex)
        epsilon = 0.25  # separates all three eigenvalues into distinct bins
        draws = 4000
        counts = {}
        for _ in range(draws):
            b, _, _ = qpe_project(dec, state, epsilon, rng)
            counts[b] = counts.get(b, 0) + 1
        bins = np.floor(lam / epsilon + 0.5).astype(int)
        for b, p in zip(bins, [0.5, 0.3, 0.2]):
            freq = counts.get(int(b), 0) / draws
            sigma = np.sqrt(p * (1 - p) / draws)
            assert abs(freq - p) <= 3.0 * sigma, f"bin {b}: {freq} vs {p}"

    def test_estimate_clamped_to_unit_interval(self):
        rng = np.random.default_rng(11)
        dec = eig(HermitianOperator(np.diag([0.95, -0.95])))
        state = np.array([1.0, 0.0], dtype=complex)
        bin_idx, energy, _ = qpe_project(dec, state, 0.6, rng)
        assert bin_idx == 2 and energy == 1.0
        state = np.array([0.0, 1.0], dtype=complex)
        bin_idx, energy, _ = qpe_project(dec, state, 0.6, rng)
        assert bin_idx == -2 and energy == -1.0


class TestQueryCosts:
    def test_hand_checked_values(self):
        # delta=0.01: ceil(1/(0.1 pi)) = 4 repetitions; register cost
        # ceil(log2 2) * ceil(log2 100) * ceil(2) = 1*7*2 = 14
        assert query_costs(0.5, 0.01, 37) == (37 * 4 + 14, 16)
        # delta=1/16: 2 repetitions; 4*4*10 = 160
        assert query_costs(0.1, 1.0 / 16.0, 100) == (360, 8)

    def test_validation(self):
        with pytest.raises(RangeError):
            query_costs(0.1, 0.0, 10)
        with pytest.raises(RangeError):
            query_costs(0.8, 0.1, 10)
        with pytest.raises(ValidationError):
            query_costs(0.1, 0.1, -1)


class TestBuildHsign:
    def test_spectral_close_to_reflection_off_band(self):
        # eigenvalues at least eps/2 away from the cutoff on both sides
        lam = np.array([-0.8, -0.45, 0.05, 0.6])
        dec = eig(HermitianOperator(np.diag(lam)))
        epsilon, delta = 0.3, 0.05
        cutoff = -0.1
        S = fourier_sign(epsilon, delta)
        cfg_s = CoolingConfig(epsilon=epsilon, steps=4, delta=delta)
        cfg_r = CoolingConfig(epsilon=epsilon, steps=4, delta=delta, mode="exact_reflection")
        hs = build_hsign(dec, cutoff, cfg_s, S)
        hr = build_hsign(dec, cutoff, cfg_r)
        assert np.linalg.norm(hs - hr, 2) <= delta + 1e-9

    def test_circuit_mode_matches_spectral(self):
        rng = np.random.default_rng(13)
        H = random_hermitian(rng, 6, norm=0.9)
        dec = eig(H)
        epsilon, delta = 0.3, 0.1
        S = fourier_sign(epsilon, delta)
        cfg_s = CoolingConfig(epsilon=epsilon, steps=4, delta=delta)
        cfg_g = CoolingConfig(epsilon=epsilon, steps=4, delta=delta, mode="gqsp_circuit")
        for cutoff in (-0.4, 0.1, 0.8):
            hs = build_hsign(dec, cutoff, cfg_s, S)
            hg = build_hsign(dec, cutoff, cfg_g, S)
            assert np.linalg.norm(hs - hg, 2) <= 1e-9

    def test_range_guard_and_missing_polynomial(self):
        dec = eig(HermitianOperator(np.diag([-0.9, 0.9])))
        cfg = CoolingConfig(epsilon=0.3, steps=4)
        S = fourier_sign(0.3, 0.25)
        with pytest.raises(RangeError):
            build_hsign(dec, 2.5, cfg, S)
        with pytest.raises(ValidationError):
            build_hsign(dec, 0.0, cfg, None)


class TestRunInvariants:
    def test_zero_perturbation_freezes_trajectory(self):
        rng = np.random.default_rng(17)
        H = random_hermitian(rng, 8, norm=1.0)
        cfg = CoolingConfig(epsilon=0.25, steps=6)
        traj = run(H, np.zeros((8, 8)), cfg, rng)
        assert len(traj.steps) == 6
        first = traj.steps[0]
        for s in traj.steps:
            assert s.energy_estimate == first.energy_estimate
            assert abs(s.ground_overlap - first.ground_overlap) <= 1e-12
            assert abs(s.true_energy - first.true_energy) <= 1e-12
            assert s.leakage_weight <= 1e-18
            assert not s.leak_event
        assert traj.success and traj.leak_events == 0
        assert traj.final_energy_estimate == first.energy_estimate

    def test_per_step_leakage_weight_within_budget(self):
        for mode in ("exact_spectral", "exact_reflection"):
            for seed in range(6):
                rng = np.random.default_rng(seed)
                H = random_hermitian(rng, 8, norm=1.0)
                A = normalized_gue(rng, 8)
                cfg = CoolingConfig(epsilon=0.25, steps=5, mode=mode)
                traj = run(H, A, cfg, rng)
                for s in traj.steps:
                    assert s.leakage_weight <= cfg.delta + 1e-8

    def test_bookkeeping_and_cumulative_queries(self):
        rng = np.random.default_rng(19)
        H = random_hermitian(rng, 6, norm=1.0)
        A = normalized_gue(rng, 6)
        cfg = CoolingConfig(epsilon=0.25, steps=4)
        traj = run(H, A, cfg, rng)
        per_eiH = traj.steps[0].queries_eiH
        per_UA = traj.steps[0].queries_UA
        for s in traj.steps:
            assert s.queries_eiH == per_eiH * (s.step + 1)
            assert s.queries_UA == per_UA * (s.step + 1)
        assert traj.success == (traj.leak_events == 0)
        assert 0.0 <= traj.final_ground_overlap <= 1.0 + 1e-12

    def test_leak_event_flags_match_bin_sequence(self):
        # strong coupling on a two-level system produces occasional leaks
        H = HermitianOperator(np.diag([-0.5, 0.5]))
        A = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        cfg = CoolingConfig(epsilon=0.25, steps=3, delta=0.9)
        ground = np.array([1.0, 0.0], dtype=complex)
        total_events = 0
        for trial in range(400):
            rng = np.random.default_rng((123, trial))
            traj = run(H, A, cfg, rng, initial_state=ground)
            bins = [s.bin_index for s in traj.steps] + [traj.final_bin]
            for i, s in enumerate(traj.steps):
                assert s.leak_event == (bins[i + 1] >= bins[i] + 2)
            total_events += traj.leak_events
        assert total_events > 0

    def test_stopping_rule_exits_early(self):
        rng = np.random.default_rng(23)
        H = HermitianOperator(np.diag([-0.75, -0.25, 0.25, 0.75]))
        ground = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        cfg = CoolingConfig(epsilon=0.5, steps=5)
        traj = run(H, np.zeros((4, 4)), cfg, rng, initial_state=ground,
                   stopping=StoppingRule(target_estimate=-0.5))
        assert len(traj.steps) == 0
        assert traj.final_energy_estimate == pytest.approx(-0.5)

    def test_rejects_oversized_operators(self):
        rng = np.random.default_rng(29)
        H = random_hermitian(rng, 4, norm=1.2)
        cfg = CoolingConfig(epsilon=0.25, steps=2)
        with pytest.raises(ValidationError):
            run(H, np.zeros((4, 4)), cfg, rng)
        H = random_hermitian(rng, 4, norm=0.9)
        with pytest.raises(ValidationError):
            run(H, 3.0 * np.eye(4), cfg, rng)


class TestToyModel:
    def test_ground_transfer_matches_closed_form(self):
        H, A = toy_instance()
        delta, d = 0.01, 5
        t = default_time(delta)
        p = np.sin(np.sqrt(delta) * t / 2.0) ** 2
        oracle = 1.0 - (1.0 - p) ** d
        init = np.zeros(4, dtype=complex)
        init[2] = 1.0
        cfg = CoolingConfig(epsilon=0.5, steps=d, delta=delta, mode="exact_reflection")
        finals = []
        for trial in range(150):
            rng = np.random.default_rng((77, trial))
            finals.append(run(H, A, cfg, rng, initial_state=init).final_ground_overlap)
        mean = np.mean(finals)
        # residual systematic error is the O(sqrt(delta)) rotating correction
        assert abs(mean - oracle) <= 0.06, f"{mean:.4f} vs oracle {oracle:.4f}"
        assert mean > 0.5


class TestModeAgreement:
    def test_spectral_and_circuit_trajectories_agree(self):
        H, A = toy_instance()
        init = np.zeros(4, dtype=complex)
        init[2] = 1.0
        for trial in range(10):
            runs = {}
            for mode in ("exact_spectral", "gqsp_circuit"):
                cfg = CoolingConfig(epsilon=0.5, steps=4, delta=0.04, mode=mode)
                rng = np.random.default_rng((55, trial))
                runs[mode] = run(H, A, cfg, rng, initial_state=init)
            a, b = runs["exact_spectral"], runs["gqsp_circuit"]
            for s, t in zip(a.steps, b.steps):
                assert s.energy_estimate == t.energy_estimate
                assert abs(s.ground_overlap - t.ground_overlap) <= 1e-6
                assert abs(s.true_energy - t.true_energy) <= 1e-6
            assert a.final_bin == b.final_bin


class TestCoherentRoute:
    def setup_state(self, dim=8, n=4, seed=31):
        rng = np.random.default_rng(seed)
        H = random_hermitian(rng, dim, norm=0.95)
        dec = eig(H)
        psi = random_initial_state(rng, dim)
        return rng, H, dec, psi, n

    def test_prepare_joint_preserves_bin_weights(self):
        rng, H, dec, psi, n = self.setup_state()
        joint = prepare_joint(dec, psi, n)
        assert abs(np.linalg.norm(joint) - 1.0) <= 1e-12
        width = 2.0 * np.pi / 2**n
        amps = dec.eigenvectors.conj().T @ psi
        bins = np.round(dec.eigenvalues / width).astype(int) % 2**n
        pops = register_populations(joint, n)
        for j in range(2**n):
            expected = np.sum(np.abs(amps[bins == j]) ** 2)
            assert abs(pops[j] - expected) <= 1e-12

    def test_step_preserves_register_populations(self):
        rng, H, dec, psi, n = self.setup_state()
        S = fourier_sign(2.0 * np.pi / 2**n, 0.1)
        A = normalized_gue(rng, 8)
        joint = prepare_joint(dec, psi, n)
        after = coherent_step(joint, dec, A, n, S, 0.1)
        assert abs(np.linalg.norm(after) - 1.0) <= 1e-10
        before_pops = register_populations(joint, n)
        after_pops = register_populations(after, n)
        assert np.max(np.abs(before_pops - after_pops)) <= 1e-12

    def test_branches_match_signed_shift_construction(self):
        rng, H, dec, psi, n = self.setup_state()
        reg = 2**n
        width = 2.0 * np.pi / reg
        delta = 0.1
        S = fourier_sign(width, delta)
        A = normalized_gue(rng, 8)
        joint = prepare_joint(dec, psi, n)
        after = coherent_step(joint, dec, A, n, S, delta)
        blocks = after.reshape(reg, 8)
        start = joint.reshape(reg, 8)
        t = default_time(delta)
        for j in range(reg):
            if np.linalg.norm(start[j]) < 1e-12:
                continue
            signed = j if j < reg // 2 else j - reg
            hsign = apply_spectral(S, H, signed * width + width).entries
            htilde = HermitianOperator(hsign + 0.5 * np.sqrt(delta) * A)
            expected = evolve(htilde, t).entries @ start[j]
            assert np.linalg.norm(blocks[j] - expected) <= 1e-10, f"register {j}"

    def test_zero_perturbation_keeps_branch_magnitudes(self):
        rng, H, dec, psi, n = self.setup_state(seed=37)
        S = fourier_sign(2.0 * np.pi / 2**n, 0.1)
        joint = prepare_joint(dec, psi, n)
        after = coherent_step(joint, dec, np.zeros((8, 8)), n, S, 0.1)
        amps_before = np.abs(dec.eigenvectors.conj().T @ joint.reshape(2**n, 8).T)
        amps_after = np.abs(dec.eigenvectors.conj().T @ after.reshape(2**n, 8).T)
        assert np.max(np.abs(amps_before - amps_after)) <= 1e-10
