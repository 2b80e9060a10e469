import json

import numpy as np
import pytest

from ssvepsim import classifier, dsp
from ssvepsim.synth import ELECTRODES, SubjectModel

FS = 256.0
FREQS = (7.0, 11.0, 9.0, 8.0, 20.0, 12.0)


def classify_windows(windows, plan, coeffs):
    peaks = {}
    for w in windows:
        zeroed = dsp.SignalWindow(
            w.samples - w.samples.mean(), w.fs, w.electrode, w.t0
        )
        spectrum = dsp.magnitude_spectrum(dsp.zero_phase_filter(coeffs, zeroed))
        peaks[w.electrode] = classifier.peak_frequencies(spectrum, plan)
    return classifier.harmonic_points(peaks["O1"], peaks["Oz"], peaks["O2"], plan)


@pytest.fixture(scope="module")
def pipeline():
    return (
        classifier.build_plan(FREQS, window_s=2.0, fs=FS),
        dsp.design_bandpass(3, 3.0, 50.0, FS),
    )


class TestGeneration:
    def test_clean_spectrum_structure(self):
        subj = SubjectModel(
            gaze=3, ssvep_amp=2.0, harmonic_decay=0.5, noise_sigma=0.0,
            alpha_amp=0.0, electrode_gain=(1.0, 0.85, 1.0), seed=0,
        )
        windows = subj.generate_window(2.0, FS)
        for w, gain in zip(windows, (1.0, 0.85, 1.0)):
            spectrum = dsp.magnitude_spectrum(w)
            for k, expected in [(1, 2.0), (2, 1.0), (3, 0.5)]:
                bin_idx = round(8 * k * 512 / 256)
                assert spectrum.mags[bin_idx] == pytest.approx(gain * expected, rel=1e-9)

    def test_gaze_none_has_no_tones(self):
        subj = SubjectModel(gaze=None, noise_sigma=0.0, alpha_amp=0.0, seed=0)
        windows = subj.generate_window(1.0, FS)
        assert all(np.all(w.samples == 0.0) for w in windows)

    def test_alpha_present_without_gaze(self):
        subj = SubjectModel(gaze=None, noise_sigma=0.0, alpha_amp=1.5, seed=0)
        w = subj.generate_window(2.0, FS)[0]
        spectrum = dsp.magnitude_spectrum(w)
        assert spectrum.mags[round(10 * 2)] == pytest.approx(1.5, rel=1e-9)

    def test_same_seed_bit_identical(self):
        a = SubjectModel.preset("good", seed=3, gaze=2)
        b = SubjectModel.preset("good", seed=3, gaze=2)
        for _ in range(4):
            wa = a.generate_window(0.5, FS)
            wb = b.generate_window(0.5, FS)
            assert all(np.array_equal(x.samples, y.samples) for x, y in zip(wa, wb))

    def test_electrode_labels_and_clock(self):
        subj = SubjectModel(seed=0)
        first = subj.generate_window(0.5, FS)
        second = subj.generate_window(0.5, FS)
        assert [w.electrode for w in first] == list(ELECTRODES)
        assert all(w.t0 == 0.0 for w in first)
        assert all(w.t0 == 0.5 for w in second)

    def test_fractional_sample_duration_rejected(self):
        subj = SubjectModel(seed=0)
        with pytest.raises(ValueError):
            subj.generate_window(0.1, FS)  # 25.6 samples

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            SubjectModel(harmonic_decay=0.0)
        with pytest.raises(ValueError):
            SubjectModel(noise_sigma=-1.0)
        with pytest.raises(ValueError):
            SubjectModel(gaze=6)


class TestGazeSwitching:
    def test_phase_continuity_across_windows(self):
        spliced_subj = SubjectModel(gaze=3, noise_sigma=0.0, alpha_amp=0.5, seed=0)
        direct_subj = SubjectModel(gaze=3, noise_sigma=0.0, alpha_amp=0.5, seed=0)
        spliced = np.concatenate(
            [spliced_subj.generate_window(1.0, FS)[1].samples for _ in range(2)]
        )
        direct = direct_subj.generate_window(2.0, FS)[1].samples
        assert np.allclose(spliced, direct, atol=1e-10)

    def test_splice_has_no_spectral_splatter(self):
        subj = SubjectModel(gaze=3, ssvep_amp=2.0, harmonic_decay=0.5,
                            noise_sigma=0.0, alpha_amp=0.0, seed=0)
        parts = [subj.generate_window(1.0, FS)[0].samples for _ in range(2)]
        spectrum = dsp.magnitude_spectrum(dsp.SignalWindow(np.concatenate(parts), FS))
        tone_bins = [round(8 * k * 512 / 256) for k in range(1, 16)]
        rest = np.delete(spectrum.mags, tone_bins)
        assert np.max(rest) < 1e-12

    def test_regaze_same_target_keeps_phase(self):
        subj = SubjectModel(gaze=3, noise_sigma=0.0, alpha_amp=0.0, seed=0)
        ref = SubjectModel(gaze=3, noise_sigma=0.0, alpha_amp=0.0, seed=0)
        a1 = subj.generate_window(1.0, FS)[0].samples
        subj.set_gaze(3)  # no-op
        a2 = subj.generate_window(1.0, FS)[0].samples
        b = ref.generate_window(2.0, FS)[0].samples
        assert np.allclose(np.concatenate([a1, a2]), b, atol=1e-10)

    def test_gaze_none_to_target_and_back(self, pipeline):
        plan, coeffs = pipeline
        subj = SubjectModel(gaze=None, ssvep_amp=2.0, harmonic_decay=0.5,
                            noise_sigma=0.0, alpha_amp=0.0, seed=0)
        subj.set_gaze(3)
        subj.generate_window(2.0, FS)
        points = classify_windows(subj.generate_window(2.0, FS), plan, coeffs)
        assert points.points[3] == 1.0
        subj.set_gaze(None)
        subj.generate_window(2.0, FS)
        points = classify_windows(subj.generate_window(2.0, FS), plan, coeffs)
        assert np.all(points.points == 0.0)

    def test_new_target_restarts_phases(self):
        subj = SubjectModel(gaze=0, noise_sigma=0.0, alpha_amp=0.0, seed=0)
        subj.generate_window(0.5, FS)
        subj.set_gaze(3)
        fresh = SubjectModel(gaze=3, noise_sigma=0.0, alpha_amp=0.0, seed=0)
        # alpha phase differs but is absent here; SSVEP tones restart at 0
        a = subj.generate_window(1.0, FS)[0].samples
        b = fresh.generate_window(1.0, FS)[0].samples
        assert np.allclose(a, b, atol=1e-10)


class TestStatisticalProperties:
    def test_parseval_power_balance(self):
        subj = SubjectModel(gaze=3, ssvep_amp=2.0, harmonic_decay=0.5,
                            noise_sigma=1.0, alpha_amp=1.0, seed=2)
        powers = [
            np.mean(np.square(subj.generate_window(2.0, FS)[0].samples))
            for _ in range(100)
        ]
        n_tones = subj._harmonic_count(FS)
        tone_power = sum(
            (2.0 * 0.5 ** (k - 1)) ** 2 / 2.0 for k in range(1, n_tones + 1)
        )
        expected = tone_power + 1.0**2 / 2.0 + 1.0**2
        assert np.mean(powers) == pytest.approx(expected, rel=0.05)

    def test_noise_free_points_saturate(self, pipeline):
        plan, coeffs = pipeline
        for gaze in range(6):
            subj = SubjectModel(gaze=gaze, ssvep_amp=2.0, harmonic_decay=0.5,
                                noise_sigma=0.0, alpha_amp=0.0, seed=1)
            subj.generate_window(2.0, FS)
            points = classify_windows(subj.generate_window(2.0, FS), plan, coeffs)
            assert points.points[gaze] == 1.0

    def test_rest_false_activation_bound(self, pipeline):
        plan, coeffs = pipeline
        subj = SubjectModel(gaze=None, ssvep_amp=2.0, noise_sigma=1.0,
                            alpha_amp=1.0, seed=11)
        exceed = 0
        for _ in range(200):
            points = classify_windows(subj.generate_window(2.0, FS), plan, coeffs)
            if np.max(points.points) > 0.25:
                exceed += 1
        assert exceed / 200 <= 0.05


class TestProfiles:
    def test_preset_names(self):
        assert SubjectModel.preset("good").ssvep_amp == 2.0
        assert SubjectModel.preset("absent").ssvep_amp == 0.0
        with pytest.raises(ValueError):
            SubjectModel.preset("superhuman")

    def test_profile_roundtrip(self, tmp_path):
        path = tmp_path / "subject.json"
        path.write_text(json.dumps({
            "ssvep_amp": 1.4,
            "harmonic_decay": 0.6,
            "noise_sigma": 0.9,
            "alpha_amp": 0.4,
            "electrode_gain": [1.0, 0.7, 1.1],
            "seed": 17,
        }))
        subj = SubjectModel.from_profile(path)
        assert subj.ssvep_amp == 1.4
        assert subj.electrode_gain == (1.0, 0.7, 1.1)
        assert subj.seed == 17

    def test_profile_preset_with_overrides(self, tmp_path):
        path = tmp_path / "subject.json"
        path.write_text(json.dumps({"preset": "weak", "noise_sigma": 2.5}))
        subj = SubjectModel.from_profile(path, seed=3)
        assert subj.noise_sigma == 2.5
        assert subj.ssvep_amp == SubjectModel.preset("weak").ssvep_amp
        assert subj.seed == 3
