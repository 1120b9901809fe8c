"""Image metrics against loop oracles; PGM I/O; write-back experiments."""

import math

import numpy as np
import pytest

from mramsim import (
    AllocationError,
    Environment,
    FileFormatError,
    ImageBuffer,
    build_pool,
    characterize,
    create_chip,
    get_profile,
    mse,
    read_pgm,
    run_image_experiment,
    snr,
    sort_addresses,
    write_pgm,
)
from mramsim.quality import format_metric, quality_csv_row
from tests.conftest import SMALL_CAPACITY


def _loop_metrics(original, approx):
    """The metric definitions written as plain double loops."""
    signal = noise = 0
    h, w = original.shape
    for y in range(h):
        for x in range(w):
            f = int(original[y][x])
            f_hat = int(approx[y][x])
            signal += f_hat * f_hat
            noise += (f_hat - f) ** 2
    loop_snr = math.inf if noise == 0 else signal / noise
    loop_mse = noise / (h * w)
    return loop_snr, loop_mse


class TestMetrics:
    def test_single_pixel_error_of_three_squares_to_nine(self):
        original = ImageBuffer(np.array([[3]], dtype=np.uint8))
        approx = ImageBuffer(np.array([[0]], dtype=np.uint8))
        assert mse(original, approx) == 9.0

    def test_uniform_offset_gives_unit_snr(self):
        original = ImageBuffer(np.zeros((2, 2), dtype=np.uint8))
        approx = ImageBuffer(np.full((2, 2), 2, dtype=np.uint8))
        assert snr(original, approx) == 1.0
        assert mse(original, approx) == 4.0

    def test_perfect_read_back(self):
        img = ImageBuffer(np.arange(36, dtype=np.uint8).reshape(6, 6))
        assert snr(img, img) == math.inf
        assert mse(img, img) == 0.0

    def test_zero_noise_iff_infinite_snr(self):
        rng = np.random.default_rng(0)
        for _ in range(40):
            h, w = rng.integers(1, 24, size=2)
            a = ImageBuffer(rng.integers(0, 256, (h, w)).astype(np.uint8))
            b_arr = a.pixels.copy()
            if rng.integers(0, 2):
                b_arr[rng.integers(0, h), rng.integers(0, w)] ^= 0xFF
            b = ImageBuffer(b_arr)
            assert (mse(a, b) == 0.0) == (snr(a, b) == math.inf)

    def test_matches_double_loop_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            h, w = rng.integers(1, 32, size=2)
            original = rng.integers(0, 256, (h, w)).astype(np.uint8)
            approx = rng.integers(0, 256, (h, w)).astype(np.uint8)
            want_snr, want_mse = _loop_metrics(original, approx)
            got_snr = snr(ImageBuffer(original), ImageBuffer(approx))
            got_mse = mse(ImageBuffer(original), ImageBuffer(approx))
            assert got_snr == pytest.approx(want_snr, rel=1e-12)
            assert got_mse == pytest.approx(want_mse, rel=1e-12)

    def test_dimension_mismatch_rejected(self):
        a = ImageBuffer(np.zeros((2, 3), dtype=np.uint8))
        b = ImageBuffer(np.zeros((3, 2), dtype=np.uint8))
        with pytest.raises(FileFormatError):
            snr(a, b)

    def test_no_precision_loss_at_full_scale(self):
        # 255^2 * 4096 pixels exceeds float32 integer range; int64 keeps it
        original = ImageBuffer(np.zeros((64, 64), dtype=np.uint8))
        approx = ImageBuffer(np.full((64, 64), 255, dtype=np.uint8))
        assert mse(original, approx) == 255.0**2


class TestImageBuffer:
    def test_coerces_plain_integer_arrays(self):
        img = ImageBuffer(np.array([[1, 2], [3, 4]]))
        assert img.pixels.dtype == np.uint8
        assert img.width == 2 and img.height == 2 and img.pixel_count == 4

    def test_rejects_bad_shapes_and_ranges(self):
        with pytest.raises(FileFormatError):
            ImageBuffer(np.zeros(4, dtype=np.uint8))
        with pytest.raises(FileFormatError):
            ImageBuffer(np.zeros((0, 4), dtype=np.uint8))
        with pytest.raises(FileFormatError):
            ImageBuffer(np.array([[256]]))
        with pytest.raises(FileFormatError):
            ImageBuffer(np.array([[-1]]))


class TestPgm:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(2)
        img = ImageBuffer(rng.integers(0, 256, (17, 23)).astype(np.uint8))
        path = tmp_path / "img.pgm"
        write_pgm(img, path)
        back = read_pgm(path)
        assert np.array_equal(back.pixels, img.pixels)
        assert path.read_bytes().startswith(b"P5\n23 17\n255\n")

    def test_comments_in_header_are_skipped(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# made by hand\n2 # inline\n2\n255\n\x01\x02\x03\x04")
        img = read_pgm(path)
        assert img.pixels.tolist() == [[1, 2], [3, 4]]

    @pytest.mark.parametrize(
        "raw",
        [
            b"P2\n2 2\n255\n",  # ascii variant
            b"P5\n2 2\n65535\n" + b"\x00" * 8,  # 16-bit depth
            b"P5\n2 2\n255\n\x00\x00\x00",  # short pixel data
            b"P5\n2 2\n",  # truncated header
            b"P5\n-2 2\n255\n",  # sign is not part of the grammar
            b"",
        ],
    )
    def test_malformed_files_rejected(self, tmp_path, raw):
        path = tmp_path / "bad.pgm"
        path.write_bytes(raw)
        with pytest.raises(FileFormatError):
            read_pgm(path)


def _small_image(side=32, dark_rows=8):
    """Gradient with a block of zero-valued rows (the vulnerable pixels)."""
    img = np.tile(
        np.linspace(40, 255, side).astype(np.uint8), (side, 1)
    )
    img[:dark_rows, :] = 0
    return ImageBuffer(img)


class TestExperiment:
    def test_zeros_background_reads_back_clean(self, c1_small):
        chip = create_chip(c1_small, 0)
        read_back, report = run_image_experiment(
            chip, _small_image(), init="all_zeros", selection="none"
        )
        assert report.erroneous_pixels == 0
        assert report.mse == 0.0
        assert report.snr == math.inf
        assert np.array_equal(read_back.pixels, _small_image().pixels)

    def test_ones_background_hurts_dark_pixels(self, c1_small):
        chip = create_chip(c1_small, 0)
        _, report = run_image_experiment(
            chip, _small_image(), init="all_ones", selection="none"
        )
        assert report.erroneous_pixels > 0
        assert 0.0 < report.snr < math.inf

    def test_selection_on_a_characterized_chip_is_exact(self, c1_small):
        chip = create_chip(c1_small, 0)
        errmap = characterize(chip, 5.0, 50)
        ordering = sort_addresses(
            errmap, errmap.last_intended, errmap.last_stored
        )
        pool = build_pool(errmap, chip.capacity_words, ordering)
        image = _small_image()
        assert pool.accurate_free >= image.pixel_count
        _, report = run_image_experiment(
            chip, image, init="all_ones", selection="strategy1", pool=pool
        )
        assert report.mse == 0.0
        assert report.erroneous_pixels == 0

    def test_strategy1_requires_a_pool(self, c1_small):
        chip = create_chip(c1_small, 0)
        with pytest.raises(AllocationError):
            run_image_experiment(
                chip, _small_image(), init="all_ones", selection="strategy1"
            )

    def test_experiment_is_deterministic(self, c1_small):
        reports = []
        for _ in range(2):
            chip = create_chip(c1_small, 4)
            _, report = run_image_experiment(
                chip, _small_image(), init="all_ones", selection="none"
            )
            reports.append(report)
        assert reports[0] == reports[1]

    def test_image_larger_than_chip_rejected(self):
        profile = get_profile("C5", capacity_words=256)
        chip = create_chip(profile, 0)
        too_big = ImageBuffer(np.zeros((20, 20), dtype=np.uint8))
        from mramsim import AddressError

        with pytest.raises(AddressError):
            run_image_experiment(chip, too_big)

    def test_packed_mode_round_trips_at_rated_pulse(self, c1_small):
        for side in (9, 10):  # odd and even pixel counts
            chip = create_chip(c1_small, 1)
            image = _small_image(side=side)
            read_back, report = run_image_experiment(
                chip, image, init="all_zeros", selection="none",
                t_w_ns=15.0, pack_two_per_word=True,
            )
            assert np.array_equal(read_back.pixels, image.pixels)
            assert report.mse == 0.0

    def test_bad_init_and_selection_names(self, c1_small):
        chip = create_chip(c1_small, 0)
        with pytest.raises(FileFormatError):
            run_image_experiment(chip, _small_image(), init="ones")
        with pytest.raises(FileFormatError):
            run_image_experiment(chip, _small_image(), selection="strategy3")


class TestReportFormatting:
    def test_csv_row_spells_infinity(self):
        from mramsim.quality import QualityReport

        report = QualityReport(
            image="x.pgm", init="all_zeros", selection="none",
            t_w_ns=5.0, snr=math.inf, mse=0.0, erroneous_pixels=0,
        )
        assert quality_csv_row(report) == "x.pgm,all_zeros,none,5,inf,0.000000,0"

    def test_format_metric(self):
        assert format_metric(math.inf) == "inf"
        assert format_metric(1.5) == "1.500000"

    def test_snr_db(self):
        from mramsim.quality import QualityReport

        report = QualityReport(
            image="x", init="all_ones", selection="none",
            t_w_ns=5.0, snr=100.0, mse=1.0, erroneous_pixels=1,
        )
        assert report.snr_db == pytest.approx(20.0)
