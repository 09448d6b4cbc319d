"""Disordered-ensemble tests: case table, seeding, censuses, phase maps."""

import numpy as np
import pytest

from nuwalk import (
    CoinField,
    DisorderSpec,
    LatticeSpec,
    UnsupportedCaseError,
    WalkKind,
    build_symmetry,
    cell_master_seed,
    check_antiunitary_relation,
    coin_stream,
    compose_walk,
    phase_map,
    realization_walk,
    run_ensemble,
    run_realization,
    sample_coin_field,
    symmetrize_reflect,
)

LAT = LatticeSpec(16)


def spec_for(case, n=16, master_seed=7, gamma=np.log(1.1), **kw):
    defaults = dict(mean_theta1=np.pi / 3, mean_theta2=-np.pi / 12)
    defaults.update(kw)
    return DisorderSpec(case=case, gamma=gamma, lattice=LatticeSpec(n),
                        master_seed=master_seed, **defaults)


class TestCaseTable:
    def test_walk_kind_per_case(self):
        assert spec_for("A").walk_kind == WalkKind.U1_PT
        assert spec_for("B").walk_kind == WalkKind.U1_PT
        assert spec_for("C").walk_kind == WalkKind.U2_TRS
        assert spec_for("D").walk_kind == WalkKind.U2_TRS

    def test_randomized_coins_per_case(self):
        assert spec_for("A").randomized == (True, False)
        assert spec_for("B").randomized == (True, True)
        assert spec_for("C").randomized == (True, False)
        assert spec_for("D").randomized == (True, True)

    def test_case_is_uppercased(self):
        assert spec_for("c").case == "C"

    def test_unknown_case_rejected(self):
        with pytest.raises(UnsupportedCaseError):
            spec_for("E")

    def test_negative_half_width_rejected(self):
        with pytest.raises(ValueError):
            spec_for("A", half_width=-0.1)

    def test_negative_master_seed_rejected(self):
        with pytest.raises(ValueError):
            spec_for("A", master_seed=-1)


class TestSampling:
    def test_random_coin_stays_in_the_box(self):
        spec = spec_for("D", n=4096, half_width=0.3)
        field = sample_coin_field(spec, 0)
        assert np.all(np.abs(field.theta1 - spec.mean_theta1) <= 0.3)
        assert np.all(np.abs(field.theta2 - spec.mean_theta2) <= 0.3)

    def test_constant_coin_is_exactly_the_mean(self):
        field = sample_coin_field(spec_for("A"), 0)
        assert np.all(field.theta2 == -np.pi / 12)
        assert not np.all(field.theta1 == field.theta1[0])

    def test_zero_half_width_degenerates_to_the_mean(self):
        field = sample_coin_field(spec_for("D", half_width=0.0), 0)
        assert np.all(field.theta1 == np.pi / 3)
        assert np.all(field.theta2 == -np.pi / 12)

    def test_box_variance(self):
        spec = spec_for("D", n=100_000)
        field = sample_coin_field(spec, 0)
        expect = spec.half_width**2 / 3.0
        assert field.theta1.var() == pytest.approx(expect, rel=0.05)
        assert field.theta2.var() == pytest.approx(expect, rel=0.05)

    def test_same_indices_reproduce(self):
        spec = spec_for("D")
        a = sample_coin_field(spec, 3)
        b = sample_coin_field(spec, 3)
        assert np.array_equal(a.theta1, b.theta1)
        assert np.array_equal(a.theta2, b.theta2)

    def test_realizations_differ(self):
        spec = spec_for("D")
        a = sample_coin_field(spec, 0)
        b = sample_coin_field(spec, 1)
        assert not np.array_equal(a.theta1, b.theta1)

    def test_coins_use_independent_streams(self):
        spec = spec_for("D")
        field = sample_coin_field(spec, 0)
        assert not np.array_equal(field.theta1 - spec.mean_theta1,
                                  field.theta2 - spec.mean_theta2)

    def test_first_coin_stream_is_shared_across_cases(self):
        # streams key on (master, realization, coin), not on the case letter
        a = sample_coin_field(spec_for("A"), 0)
        b = sample_coin_field(spec_for("B"), 0)
        assert np.array_equal(a.theta1, b.theta1)

    def test_coin_stream_is_a_generator(self):
        rng = coin_stream(spec_for("A"), 0, 1)
        assert isinstance(rng, np.random.Generator)

    def test_realization_walk_matches_manual_composition(self):
        spec = spec_for("C")
        field = sample_coin_field(spec, 2)
        manual = compose_walk(WalkKind.U2_TRS, field, spec.gamma, spec.lattice)
        assert np.array_equal(realization_walk(spec, 2).matrix, manual.matrix)


class TestSymmetrizeReflect:
    def test_mirror_pairs_match(self):
        values = np.arange(8, dtype=float)
        out = symmetrize_reflect(values)
        n = len(out)
        for i in range(n):
            assert out[(n - i) % n] == out[i]

    def test_fixed_points_keep_their_values(self):
        values = np.arange(8, dtype=float)
        out = symmetrize_reflect(values)
        assert out[0] == values[0]
        assert out[4] == values[4]

    def test_odd_length(self):
        out = symmetrize_reflect(np.arange(5, dtype=float))
        assert list(out) == [0.0, 1.0, 2.0, 2.0, 1.0]

    def test_idempotent(self):
        values = np.random.default_rng(5).uniform(-1, 1, 10)
        once = symmetrize_reflect(values)
        assert np.array_equal(symmetrize_reflect(once), once)

    def test_input_not_mutated(self):
        values = np.arange(6, dtype=float)
        keep = values.copy()
        symmetrize_reflect(values)
        assert np.array_equal(values, keep)


class TestRunRealization:
    def test_result_fields(self):
        res = run_realization(spec_for("A"), 4)
        assert res.realization_index == 4
        assert res.seed_used == 7
        assert res.reality.tolerance_used == 1e-8
        assert res.eigenvector_symmetry is None

    def test_t_vectors_only_for_the_uniform_walk(self):
        with_t = run_realization(spec_for("D"), 0, check_T_vectors=True)
        assert with_t.eigenvector_symmetry is not None
        skipped = run_realization(spec_for("A"), 0, check_T_vectors=True)
        assert skipped.eigenvector_symmetry is None

    def test_reality_tol_is_forwarded(self):
        res = run_realization(spec_for("B"), 0, reality_tol=1e-3)
        assert res.reality.tolerance_used == 1e-3


class TestRunEnsemble:
    def test_single_realization_matches_direct_call(self):
        spec = spec_for("C")
        report = run_ensemble(spec, 1)
        direct = run_realization(spec, 0)
        assert report.num_realizations == 1
        assert report.per_realization[0].reality.num_complex == \
            direct.reality.num_complex

    def test_reruns_are_identical(self):
        spec = spec_for("D")
        a = run_ensemble(spec, 6)
        b = run_ensemble(spec, 6)
        assert np.array_equal(a.complex_fractions, b.complex_fractions)

    def test_aggregates_match_definitions(self):
        report = run_ensemble(spec_for("B"), 5)
        fracs = [r.reality.complex_fraction for r in report.per_realization]
        assert report.mean_complex_fraction == pytest.approx(np.mean(fracs))
        assert report.any_complex == any(f > 0 for f in fracs)
        assert report.fully_real_count == sum(1 for f in fracs if f == 0)

    def test_rejects_empty_ensemble(self):
        with pytest.raises(ValueError):
            run_ensemble(spec_for("A"), 0)

    def test_no_failures_on_clean_runs(self):
        report = run_ensemble(spec_for("A"), 4)
        assert report.failures == ()

    def test_unitary_ensembles_stay_real(self):
        report = run_ensemble(spec_for("B", gamma=0.0), 4)
        assert not report.any_complex
        assert report.max_modulus_deviations.max() < 1e-12


class TestSymmetryPhysics:
    def test_single_coin_disorder_keeps_spectra_real(self):
        report = run_ensemble(spec_for("A"), 5)
        assert not report.any_complex

    def test_double_coin_disorder_breaks_reality(self):
        report = run_ensemble(spec_for("B"), 5)
        assert np.all(report.complex_fractions >= 0.9)

    def test_disorder_breaks_the_reflection_pairing(self):
        w = realization_walk(spec_for("B"), 0)
        assert check_antiunitary_relation(w, build_symmetry("PT")) > 0.01

    def test_reflection_symmetrized_disorder_restores_the_pairing(self):
        spec = spec_for("A")
        field = sample_coin_field(spec, 0)
        sym = CoinField(symmetrize_reflect(field.theta1), field.theta2)
        w = compose_walk(WalkKind.U1_PT, sym, spec.gamma, spec.lattice)
        assert check_antiunitary_relation(w, build_symmetry("PT")) < 1e-10

    def test_uniform_walk_keeps_time_reversal_under_any_disorder(self):
        for case in ("C", "D"):
            w = realization_walk(spec_for(case, mean_theta1=np.pi / 4,
                                          mean_theta2=np.pi / 20), 0)
            assert check_antiunitary_relation(w, build_symmetry("T")) < 1e-10


class TestPhaseMap:
    def test_cell_master_seed_is_stable(self):
        assert cell_master_seed(7, 0, 0) == cell_master_seed(7, 0, 0)
        assert cell_master_seed(7, 0, 1) != cell_master_seed(7, 1, 0)

    def test_case_b_refused(self):
        with pytest.raises(UnsupportedCaseError):
            phase_map("B", [0.5], [0.5], 2, np.log(1.1), LAT, 7)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            phase_map("A", [], [0.5], 2, np.log(1.1), LAT, 7)

    def test_shapes_and_metadata(self):
        pm = phase_map("D", [0.3, 0.8], [0.1, 0.5, 0.9], 2, np.log(1.1),
                       LatticeSpec(8), 7)
        assert pm.presence.shape == (2, 3)
        assert pm.ratio.shape == (2, 3)
        assert pm.presence.dtype == bool
        assert pm.case == "D"
        assert pm.num_realizations == 2
        assert pm.failures == ()

    def test_cells_replay_their_own_ensembles(self):
        pm = phase_map("D", [0.3, 0.8], [0.1, 0.5], 3, np.log(1.1),
                       LatticeSpec(8), 7)
        spec = DisorderSpec(case="D", mean_theta1=0.8, mean_theta2=0.5,
                            gamma=np.log(1.1), lattice=LatticeSpec(8),
                            master_seed=cell_master_seed(7, 1, 1))
        report = run_ensemble(spec, 3)
        assert pm.ratio[1, 1] == report.mean_complex_fraction
        assert pm.presence[1, 1] == report.any_complex

    def test_ratio_consistent_with_presence(self):
        pm = phase_map("D", [0.3, 0.8], [0.1, 0.5], 2, np.log(1.1),
                       LatticeSpec(8), 7)
        assert np.array_equal(pm.presence, pm.ratio > 0)
