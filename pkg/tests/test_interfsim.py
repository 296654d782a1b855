import numpy as np
import pytest

from interfsim import (
    CouplingConfig, Interferogram, MeasuredZ, Mode, ProtocolSettings, SineFit, default_chi_grid,
    extract_weak_value, fit_sine, ideal_intensity, invert_asymmetries, measure_weak_value,
    pointer_infidelity, run_protocol, simulate, subtract_background,
)
from qalg.states import SpinState
from utils.errors import DataError, DomainError, ExtractionError, FitFailureError, StructuralError

PRE = SpinState.plus_x()
POST = SpinState.plus_y()


def sine_data(offset, amplitude, phase, points=16):
    chi = default_chi_grid(points)
    return chi, offset + amplitude * np.sin(chi + phase)


def z_weak_value(pre: SpinState, post: SpinState) -> complex:
    up = np.conj(post.up) * pre.up
    down = np.conj(post.down) * pre.down
    return complex((up - down) / (up + down))


class TestCouplingModel:

    def test_pointer_infidelity(self):
        assert pointer_infidelity(15) == pytest.approx(0.067, abs=5e-4)
        assert pointer_infidelity(15) == pytest.approx(np.sin(np.deg2rad(15)) ** 2, abs=1e-14)
        assert pointer_infidelity(0) == pytest.approx(0.0, abs=1e-15)

    def test_small_alpha_in_matches_out(self):
        chi = default_chi_grid(32)
        in_fringe = ideal_intensity(1e-4, chi, Mode.IN, PRE, POST)
        out_fringe = ideal_intensity(1e-4, chi, Mode.OUT, PRE, POST)
        np.testing.assert_allclose(in_fringe, out_fringe, atol=1e-6)
        np.testing.assert_allclose(
            ideal_intensity(0, chi, Mode.IN, PRE, POST), out_fringe, atol=1e-15
        )

    @pytest.mark.parametrize('mode', [Mode.IN, Mode.OUT])
    def test_flux_conservation(self, mode, rng):
        chi = default_chi_grid(16)
        for alpha in (0.0, 5.0, 15.0, 45.0, 90.0):
            for _ in range(5):
                pre = SpinState.from_unnormalized(*(rng.normal(size=2) + 1j * rng.normal(size=2)))
                post = SpinState.from_unnormalized(*(rng.normal(size=2) + 1j * rng.normal(size=2)))
                total = sum(
                    ideal_intensity(alpha, chi, mode, pre, p, port=port)
                    for p in (post, post.orthogonal()) for port in ('O', 'H')
                )
                np.testing.assert_allclose(total, 1.0, atol=1e-12)

    @pytest.mark.parametrize('mode', [Mode.BLOCK_P1, Mode.BLOCK_P2])
    def test_blocked_path_carries_half_the_flux(self, mode):
        total = sum(
            ideal_intensity(15, 0.3, mode, PRE, p, port=port)
            for p in (POST, POST.orthogonal()) for port in ('O', 'H')
        )
        assert total == pytest.approx(0.5, abs=1e-12)

    def test_orthogonal_background_has_no_signal(self):
        chi = default_chi_grid(16)
        signal = ideal_intensity(15, chi, Mode.ORTHOGONAL_BG, PRE, POST)
        np.testing.assert_allclose(signal, 0.0, atol=1e-15)

    def test_ideal_in_fringe_is_unshifted(self):
        # Re Z_w = 0 at the ideal point, so the IN fringe peaks where OUT does
        chi = np.array([0.0, np.pi / 2, 3 * np.pi / 2])
        values = ideal_intensity(15, chi, Mode.IN, PRE, POST)
        assert values[1] == pytest.approx(values[2], abs=1e-15)

    def test_bad_port(self):
        with pytest.raises(DomainError):
            ideal_intensity(15, 0.0, Mode.IN, PRE, POST, port='X')

    @pytest.mark.parametrize('alpha', [0, -1, 91, np.nan])
    def test_config_rejects_alpha(self, alpha):
        with pytest.raises(DomainError):
            CouplingConfig(alpha=alpha)

    def test_config_defaults(self):
        assert len(CouplingConfig(mode=Mode.IN).chi_grid) == 16
        assert len(CouplingConfig(mode=Mode.BLOCK_P1).chi_grid) == 1
        with pytest.raises(DomainError):
            CouplingConfig(mean_counts=0)
        with pytest.raises(DomainError):
            CouplingConfig(background_rate=-1)


class TestSimulator:

    def test_same_seed_same_counts(self):
        cfg = CouplingConfig(seed=7)
        first = simulate(cfg, PRE, POST)
        second = simulate(cfg, PRE, POST)
        np.testing.assert_array_equal(first.counts, second.counts)
        third = simulate(CouplingConfig(seed=8), PRE, POST)
        assert not np.array_equal(first.counts, third.counts)

    def test_large_counts_approach_ideal(self):
        cfg = CouplingConfig(mean_counts=1e6, background_rate=0, seed=3)
        g = simulate(cfg, PRE, POST)
        expected = ideal_intensity(15, cfg.chi_grid, Mode.IN, PRE, POST)
        relative = np.linalg.norm(g.counts / 1e6 - expected) / np.linalg.norm(expected)
        assert relative < 0.01

    def test_orthogonal_background_counts(self):
        noiseless = simulate(CouplingConfig(mode=Mode.ORTHOGONAL_BG, noiseless=True), PRE, POST)
        np.testing.assert_allclose(noiseless.counts, 20.0, rtol=0, atol=1e-12)
        drawn = simulate(CouplingConfig(mode=Mode.ORTHOGONAL_BG, seed=5), PRE, POST)
        assert len(drawn.counts) == 16
        assert abs(drawn.counts.mean() - 20) < 5

    def test_noiseless_returns_expected_counts(self):
        cfg = CouplingConfig(noiseless=True)
        g = simulate(cfg, PRE, POST)
        expected = 4000 * ideal_intensity(15, cfg.chi_grid, Mode.IN, PRE, POST) + 20
        np.testing.assert_allclose(g.counts, expected, rtol=1e-14)
        assert g.metadata['noiseless'] is True
        assert g.alpha_deg == 15.0

    def test_subtract_background(self):
        signal = Interferogram([0.0, 1.0, 2.0], [100, 50, 10], Mode.IN)
        background = Interferogram([0.0, 1.0, 2.0, 3.0], [18, 22, 20, 20], Mode.ORTHOGONAL_BG)
        corrected = subtract_background(signal, background)
        np.testing.assert_allclose(corrected.counts, [80.0, 30.0, 0.0])
        np.testing.assert_allclose(corrected.variance, [105.0, 55.0, 15.0])
        assert corrected.metadata['background_mean'] == 20.0


class TestInterferogramFile:

    def test_save_and_load(self, tmp_path):
        g = simulate(CouplingConfig(seed=11), PRE, POST)
        path = tmp_path / 'in.json'
        g.save(path)
        loaded = Interferogram.load(path)
        np.testing.assert_array_equal(loaded.counts, g.counts)
        np.testing.assert_allclose(loaded.chi, g.chi)
        assert loaded.mode == Mode.IN
        assert loaded.seed == 11
        assert loaded.metadata['mean_counts'] == 4000.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError):
            Interferogram.load(tmp_path / 'absent.json')

    def test_malformed_file(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('{"mode": "IN"}', encoding='utf-8')
        with pytest.raises(DataError):
            Interferogram.load(path)
        path.write_text('not json', encoding='utf-8')
        with pytest.raises(DataError):
            Interferogram.load(path)

    def test_shape_and_sign_checks(self):
        with pytest.raises(StructuralError):
            Interferogram([0.0, 1.0], [1], Mode.IN)
        with pytest.raises(DataError):
            Interferogram([0.0], [-1], Mode.IN)


class TestSineFit:

    def test_noiseless_fit_is_exact(self):
        chi, counts = sine_data(100.0, 30.0, 0.7)
        fit = fit_sine(Interferogram(chi, counts, Mode.IN))
        np.testing.assert_allclose(fit.params, [100.0, 30.0, 0.7], atol=1e-9)
        assert fit.phase_identified
        assert fit.rss < 1e-12

    def test_negative_amplitude_is_normalized(self):
        chi, counts = sine_data(80.0, -20.0, 0.4)
        fit = fit_sine(Interferogram(chi, counts, Mode.IN))
        assert fit.amplitude == pytest.approx(20.0, abs=1e-9)
        assert fit.phase == pytest.approx(0.4 + np.pi, abs=1e-9)

    def test_constant_data_is_flagged(self):
        chi = default_chi_grid(16)
        fit = fit_sine(Interferogram(chi, np.full(16, 50.0), Mode.IN))
        assert not fit.phase_identified
        assert fit.offset == pytest.approx(50.0)

    def test_too_few_points(self):
        chi, counts = sine_data(100.0, 30.0, 0.7, points=5)
        with pytest.raises(DomainError):
            fit_sine(Interferogram(chi, counts, Mode.IN))

    def test_short_span(self):
        chi = np.linspace(0, np.pi, 12)
        with pytest.raises(DomainError):
            fit_sine(Interferogram(chi, 100 + 30 * np.sin(chi), Mode.IN))

    def test_iteration_cap(self):
        chi, counts = sine_data(100.0, 30.0, 0.3)
        with pytest.raises(FitFailureError) as excinfo:
            fit_sine(Interferogram(chi, counts, Mode.IN), max_iter=1)
        assert len(excinfo.value.residual_trace) == 2

    def test_phase_pulls(self):
        chi = default_chi_grid(16)
        truth = 1.0
        pulls = []
        for seed in range(500):
            rng = np.random.default_rng(seed)
            counts = rng.poisson(1000 + 500 * np.sin(chi + truth))
            fit = fit_sine(Interferogram(chi, counts, Mode.IN))
            delta = np.angle(np.exp(1j * (fit.phase - truth)))
            pulls.append(delta / fit.sigmas[2])
        assert 0.7 <= np.mean(np.abs(pulls)) <= 0.9


class TestExtraction:

    def test_inversion_inverts_forward_model(self):
        alpha = np.deg2rad(15)
        z = 0.5 + 0.3j
        k = np.cos(alpha / 2) ** 2 + np.sin(alpha / 2) ** 2 * abs(z) ** 2
        forward = np.sin(alpha) * z / k
        assert abs(invert_asymmetries(forward.real, forward.imag, 15) - z) < 1e-12

    def test_linearized_inversion(self):
        assert invert_asymmetries(0.01, 0.02, 1, linearized=True) == pytest.approx(
            complex(0.01, 0.02) / np.deg2rad(1)
        )

    def test_noiseless_protocol_recovers_i(self):
        measured = measure_weak_value(PRE, POST, alpha_deg=15, noiseless=True)
        assert abs(measured.value - 1j) < 1e-6

    def test_linearized_small_angle(self):
        measured = measure_weak_value(PRE, POST, alpha_deg=1, noiseless=True, linearized=True)
        assert abs(measured.value - 1j) < 1e-3

    def test_linearized_is_biased_at_large_angle(self):
        measured = measure_weak_value(PRE, POST, alpha_deg=15, noiseless=True, linearized=True)
        assert abs(measured.value - 1j) > 5e-3

    def test_noiseless_protocol_general_states(self):
        pre = SpinState.from_unnormalized(1.0, 0.5)
        post = SpinState.from_unnormalized(1.0, 0.7j)
        measured = measure_weak_value(pre, post, alpha_deg=15, noiseless=True)
        assert abs(measured.value - z_weak_value(pre, post)) < 1e-6

    def test_protocol_uses_five_exposures(self):
        run = run_protocol(PRE, POST, seed=5)
        assert set(run.exposures) == set(Mode)
        seeds = {g.seed for g in run.exposures.values()}
        assert len(seeds) == 5
        assert len(run.exposures[Mode.BLOCK_P1]) == 1

    def test_protocol_is_reproducible(self):
        assert run_protocol(PRE, POST, seed=9).measured == run_protocol(PRE, POST, seed=9).measured

    def test_noisy_runs_match_reported_sigma(self):
        values = []
        sigmas = []
        for seed in range(500):
            measured = run_protocol(PRE, POST, ProtocolSettings(), seed=seed).measured
            values.append(measured.value)
            sigmas.append((measured.re_sigma, measured.im_sigma))
        values = np.array(values)
        sigmas = np.array(sigmas)
        checks = ((values.real, sigmas[:, 0], 0.0), (values.imag, sigmas[:, 1], 1.0))
        for component, reported, truth in checks:
            sigma = reported.mean()
            assert abs(component.mean() - truth) < 3 * sigma / np.sqrt(len(component))
            assert abs(component.std(ddof=1) / sigma - 1) < 0.2

    def test_zero_totals_raise(self):
        empty = SineFit(0.0, 0.0, 0.0, np.zeros((3, 3)), 0.0, 16)
        with pytest.raises(ExtractionError):
            extract_weak_value(empty, empty, 0.0, 0.0)

    def test_measured_z_rejects_negative_sigma(self):
        with pytest.raises(DomainError):
            MeasuredZ(0.0, -1.0, 1.0, 0.1)

    def test_measured_z_zero_sigma_needs_exact_flag(self):
        with pytest.raises(DomainError):
            MeasuredZ(0.0, 0.0, 1.0, 0.1)
        z = MeasuredZ(0.0, 0.0, 1.0, 0.0, exact=True)
        assert z.value == 1j
        assert z.to_dict()['exact'] is True

    def test_noisy_extraction_is_not_exact(self):
        run = run_protocol(PRE, POST, seed=11)
        assert not run.measured.exact
        assert run.measured.re_sigma > 0 and run.measured.im_sigma > 0
