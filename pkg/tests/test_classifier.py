import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssvepsim.classifier import (
    DEFAULT_CODE_MAP,
    HarmonicSearchPlan,
    PeakMatrix,
    PointsVector,
    ThresholdVector,
    build_plan,
    decide,
    harmonic_points,
    peak_frequencies,
)
from ssvepsim.dsp import SpectrumFrame

FREQS = (7.0, 11.0, 9.0, 8.0, 20.0, 12.0)
FS = 256.0


def make_plan(window_s=2.0, fs=FS):
    return build_plan(FREQS, window_s=window_s, fs=fs)


def make_spectrum(plan, mags):
    freqs = np.arange(plan.nfft // 2 + 1) * plan.fs / plan.nfft
    return SpectrumFrame(freqs=freqs, mags=np.asarray(mags, float), nfft=plan.nfft, fs=plan.fs)


def spectrum_with_spikes(plan, spikes):
    """Zero spectrum with unit spikes at the given frequencies (Hz)."""
    mags = np.zeros(plan.nfft // 2 + 1)
    for f in spikes:
        mags[round(f * plan.nfft / plan.fs)] = 1.0
    return make_spectrum(plan, mags)


def naive_peaks(spectrum, plan):
    """Brute-force oracle: per-interval linear scan, first-max tie-break."""
    out = np.zeros((6, 9))
    for i in range(6):
        for j in range(9):
            if plan.search_space[i, j] > plan.freq_cap:
                continue
            lo, hi = plan.search_points[i, j], plan.search_points[i, j + 1]
            best_k, best_v = lo, spectrum.mags[lo]
            for k in range(lo, hi + 1):
                if spectrum.mags[k] > best_v:
                    best_k, best_v = k, spectrum.mags[k]
            out[i, j] = best_k * plan.fs / plan.nfft
    return out


def reference_points(peaks_by_electrode, plan):
    """Oracle transcribing the original comparison loop: float equality of
    peak frequencies against all ten tabulated harmonics, no cap on the
    match itself, then division by 3*floor(50/f)."""
    point = np.zeros(6)
    for peaks in peaks_by_electrode:
        for i in range(6):
            for j in range(9):
                if any(
                    peaks[i, j] == plan.harmonics[i, k] for k in range(10)
                ):
                    point[i] += 1
    for i in range(6):
        point[i] /= 3 * np.floor(50.0 / plan.flicker_freqs[i])
    return point


class TestBuildPlan:
    def test_row0_borders_and_harmonics(self):
        plan = make_plan()
        assert plan.search_space[0].tolist() == [
            3.5, 10.5, 17.5, 24.5, 31.5, 38.5, 45.5, 52.5, 59.5, 66.5,
        ]
        assert plan.harmonics[0].tolist() == [7, 14, 21, 28, 35, 42, 49, 56, 63, 70]

    def test_border_bin_index(self):
        plan = make_plan()
        # 1-based round(3.5 * 2 + 1) - 1 == 7
        assert plan.search_points[0, 0] == 7

    def test_rows_strictly_increasing(self):
        plan = make_plan()
        assert np.all(np.diff(plan.search_space, axis=1) > 0)
        assert np.all(np.diff(plan.search_points, axis=1) > 0)

    def test_normalizer_inputs(self):
        assert np.floor(50.0 / 20.0) == 2.0

    def test_nfft_from_window(self):
        assert make_plan(window_s=1.0).nfft == 256
        assert make_plan(window_s=2.0).nfft == 512
        assert make_plan(window_s=4.0).nfft == 1024

    def test_duplicate_frequency_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            build_plan((7, 7, 9, 8, 20, 12))

    def test_misaligned_frequency_rejected(self):
        with pytest.raises(ValueError, match="bin-aligned"):
            build_plan((7.3, 11, 9, 8, 20, 12))

    def test_out_of_range_frequency_rejected(self):
        with pytest.raises(ValueError):
            build_plan((4, 11, 9, 8, 20, 12))

    def test_unsupported_window_rejected(self):
        with pytest.raises(ValueError):
            build_plan(FREQS, window_s=3.0)


class TestPeakFrequencies:
    def test_single_spike_found(self):
        plan = make_plan()
        spec = spectrum_with_spikes(plan, [8.0])
        peaks = peak_frequencies(spec, plan)
        assert peaks.peak_freqs[3, 0] == 8.0  # row for f=8, first interval

    def test_flat_spectrum_ties_to_lower_border(self):
        plan = make_plan()
        peaks = peak_frequencies(spec := make_spectrum(plan, np.ones(257)), plan)
        for i in range(6):
            for j in range(9):
                if plan.search_space[i, j] <= 50.0:
                    expected = plan.search_points[i, j] * plan.fs / plan.nfft
                    assert peaks.peak_freqs[i, j] == expected

    def test_interval_beyond_cap_skipped(self):
        plan = make_plan()
        peaks = peak_frequencies(make_spectrum(plan, np.ones(257)), plan)
        # f=8 row: 8th interval border is 8 * 7.5 = 60 > 50
        assert plan.search_space[3, 7] == 60.0
        assert peaks.peak_freqs[3, 7] == 0.0

    def test_cap_boundary_interval_admitted(self):
        plan = make_plan()
        peaks = peak_frequencies(spectrum_with_spikes(plan, [60.0]), plan)
        # f=20 row: interval [50, 70] has its border exactly at the cap
        assert plan.search_space[4, 2] == 50.0
        assert peaks.peak_freqs[4, 2] == 60.0

    def test_mismatched_plan_rejected(self):
        plan2 = make_plan(2.0)
        plan1 = make_plan(1.0)
        spec = spectrum_with_spikes(plan1, [8.0])
        with pytest.raises(ValueError, match="does not match"):
            peak_frequencies(spec, plan2)

    def test_matches_bruteforce_on_random_spectra(self):
        plan = make_plan()
        rng = np.random.default_rng(1234)
        for _ in range(200):
            spec = make_spectrum(plan, rng.random(257))
            got = peak_frequencies(spec, plan).peak_freqs
            assert np.array_equal(got, naive_peaks(spec, plan))


class TestHarmonicPoints:
    def test_full_match_normalizes_to_one(self):
        plan = make_plan()
        spec = spectrum_with_spikes(plan, [8, 16, 24, 32, 40, 48])
        peaks = peak_frequencies(spec, plan)
        points = harmonic_points(peaks, peaks, peaks, plan)
        assert points.points[3] == 1.0

    def test_no_match_scores_zero(self):
        plan = make_plan()
        empty = PeakMatrix(peak_freqs=np.zeros((6, 9)))
        points = harmonic_points(empty, empty, empty, plan)
        assert np.all(points.points == 0.0)

    def test_single_fundamental_on_one_electrode(self):
        plan = make_plan()
        only_7 = np.zeros((6, 9))
        only_7[0, 0] = 7.0
        one = PeakMatrix(peak_freqs=only_7)
        empty = PeakMatrix(peak_freqs=np.zeros((6, 9)))
        points = harmonic_points(one, empty, empty, plan)
        assert points.points[0] == pytest.approx(1.0 / 21.0)
        assert np.all(points.points[1:] == 0.0)

    def test_paper_mode_counts_super_cap_harmonic(self):
        plan = make_plan()
        spec = spectrum_with_spikes(plan, [20, 40, 60])
        peaks = peak_frequencies(spec, plan)
        strict = harmonic_points(peaks, peaks, peaks, plan, mode="strict")
        compat = harmonic_points(peaks, peaks, peaks, plan, mode="paper")
        assert strict.points[4] == pytest.approx(6 / 6)
        assert compat.points[4] == pytest.approx(9 / 6)  # 60 Hz also counted

    def test_paper_mode_matches_reference_loop(self):
        plan = make_plan()
        rng = np.random.default_rng(99)
        for _ in range(100):
            spec = make_spectrum(plan, rng.random(257))
            peaks = peak_frequencies(spec, plan)
            compat = harmonic_points(peaks, peaks, peaks, plan, mode="paper")
            oracle = reference_points([peaks.peak_freqs] * 3, plan)
            assert np.array_equal(compat.points, oracle)

    def test_unknown_mode_rejected(self):
        plan = make_plan()
        empty = PeakMatrix(peak_freqs=np.zeros((6, 9)))
        with pytest.raises(ValueError):
            harmonic_points(empty, empty, empty, plan, mode="loose")


class TestDecide:
    THRESHOLDS = ThresholdVector((0.26, 0.26, 0.25, 0.22, 1.0, 1.0))

    def test_forward_fires_above_threshold(self):
        points = PointsVector(points=np.array([0.30, 0, 0, 0, 0, 0.0]))
        decision = decide(points, self.THRESHOLDS)
        assert decision.winner == 0
        assert decision.command_code == 1

    def test_all_below_threshold_stops(self):
        points = PointsVector(points=np.full(6, 0.10))
        decision = decide(points, self.THRESHOLDS)
        assert decision.winner is None
        assert decision.command_code == 0

    def test_tie_breaks_to_lowest_index(self):
        points = PointsVector(points=np.array([0.5, 0.5, 0, 0, 0, 0.0]))
        decision = decide(points, self.THRESHOLDS)
        assert decision.winner == 0
        assert decision.command_code == 1

    def test_comparison_is_strict(self):
        points = PointsVector(points=np.array([0.26, 0, 0, 0, 0, 0.0]))
        assert decide(points, self.THRESHOLDS).command_code == 0

    def test_disabled_commands_never_fire(self):
        points = PointsVector(points=np.array([0, 0, 0, 0, 1.0, 1.0]))
        assert decide(points, self.THRESHOLDS).command_code == 0

    def test_custom_code_map(self):
        points = PointsVector(points=np.array([0, 0.9, 0, 0, 0, 0.0]))
        decision = decide(points, self.THRESHOLDS, freq_to_code=(6, 5, 4, 3, 2, 1))
        assert decision.command_code == 5

    def test_bad_code_map_rejected(self):
        points = PointsVector(points=np.zeros(6))
        with pytest.raises(ValueError):
            decide(points, self.THRESHOLDS, freq_to_code=(0, 1, 2, 3, 4, 5))

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            ThresholdVector((0.0, 1, 1, 1, 1, 1))
        with pytest.raises(ValueError):
            ThresholdVector((1.1, 1, 1, 1, 1, 1))


@st.composite
def random_spectra(draw):
    values = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=100.0, allow_nan=False),
            min_size=257,
            max_size=257,
        )
    )
    return np.asarray(values)


class TestProperties:
    @given(random_spectra())
    @settings(max_examples=50, deadline=None)
    def test_strict_points_bounded(self, mags):
        plan = make_plan()
        spec = make_spectrum(plan, mags)
        peaks = peak_frequencies(spec, plan)
        points = harmonic_points(peaks, peaks, peaks, plan)
        assert np.all(points.points >= 0.0)
        assert np.all(points.points <= 1.0)

    @given(st.integers(0, 5), st.integers(0, 8), st.data())
    @settings(max_examples=50, deadline=None)
    def test_adding_a_match_never_decreases_points(self, i, j, data):
        plan = make_plan()
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        spec = make_spectrum(plan, rng.random(257))
        peaks = peak_frequencies(spec, plan)
        before = harmonic_points(peaks, peaks, peaks, plan).points.copy()
        # overwrite one interval's peak with a harmonic that lies inside it
        lo_f = plan.search_space[i, j]
        hi_f = plan.search_space[i, j + 1]
        inside = [
            h for h in plan.harmonics[i]
            if lo_f <= h <= min(hi_f, plan.freq_cap)
        ]
        if not inside or lo_f > plan.freq_cap:
            return
        mutated = peaks.peak_freqs.copy()
        mutated[i, j] = inside[0]
        bumped = PeakMatrix(peak_freqs=mutated)
        after = harmonic_points(bumped, peaks, peaks, plan).points
        assert after[i] >= before[i]
        others = [k for k in range(6) if k != i]
        assert np.array_equal(after[others], before[others])

    @given(st.floats(min_value=1e-3, max_value=1e3), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_scale_invariance(self, c, seed):
        plan = make_plan()
        rng = np.random.default_rng(seed)
        mags = rng.random(257) + 0.01
        base = make_spectrum(plan, mags)
        scaled = make_spectrum(plan, mags * c)
        pb = peak_frequencies(base, plan)
        ps = peak_frequencies(scaled, plan)
        assert np.array_equal(pb.peak_freqs, ps.peak_freqs)
        thresholds = ThresholdVector((0.26, 0.26, 0.25, 0.22, 1.0, 1.0))
        db = decide(harmonic_points(pb, pb, pb, plan), thresholds)
        ds = decide(harmonic_points(ps, ps, ps, plan), thresholds)
        assert db.command_code == ds.command_code
        assert db.winner == ds.winner

    def test_determinism(self):
        plan = make_plan()
        rng = np.random.default_rng(5)
        mags = rng.random(257)
        outs = set()
        for _ in range(5):
            spec = make_spectrum(plan, mags)
            peaks = peak_frequencies(spec, plan)
            points = harmonic_points(peaks, peaks, peaks, plan)
            decision = decide(points, ThresholdVector((0.26,) * 4 + (1.0, 1.0)))
            outs.add((decision.winner, decision.command_code, tuple(points.points)))
        assert len(outs) == 1
