import gzip
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from softq.data.mnist import (
    IMAGE_MAGIC, MnistFormatError, MnistImage, downsample, downsample_many, load_from_dir, load_mnist_idx,
    make_subdataset, write_idx_images, write_idx_labels,
)


def write_pair(tmp_path, pixels, labels, stem="t"):
    return (write_idx_images(tmp_path / f"{stem}-images", pixels),
            write_idx_labels(tmp_path / f"{stem}-labels", labels))


@pytest.fixture
def synthetic_pair(tmp_path):
    rng = np.random.default_rng(0)
    pixels = rng.integers(0, 256, (30, 28, 28), dtype=np.uint8)
    labels = np.tile(np.arange(10, dtype=np.uint8), 3)
    return pixels, labels, write_pair(tmp_path, pixels, labels)


class TestIdx:
    def test_roundtrip(self, synthetic_pair, tmp_path):
        pixels, labels, (ip, lp) = synthetic_pair
        imgs = load_mnist_idx(ip, lp)
        assert len(imgs) == 30
        assert imgs.pixels.tobytes() == pixels.tobytes()
        assert np.array_equal(imgs.labels, labels)
        ip2, lp2 = write_pair(tmp_path, imgs.pixels, imgs.labels, "again")
        assert ip2.read_bytes() == ip.read_bytes() and lp2.read_bytes() == lp.read_bytes()

    def test_header_layout(self, synthetic_pair):
        _, _, (ip, _) = synthetic_pair
        assert struct.unpack(">4I", ip.read_bytes()[:16]) == (IMAGE_MAGIC, 30, 28, 28)

    def test_gzip(self, synthetic_pair, tmp_path):
        pixels, labels, (ip, lp) = synthetic_pair
        gz = tmp_path / "z-images.gz"
        gz.write_bytes(gzip.compress(ip.read_bytes()))
        assert load_mnist_idx(gz, lp).pixels.tobytes() == pixels.tobytes()

    def test_bad_magic(self, synthetic_pair):
        _, _, (ip, lp) = synthetic_pair
        with pytest.raises(MnistFormatError, match="magic"):
            load_mnist_idx(lp, lp)

    def test_truncated(self, synthetic_pair):
        _, _, (ip, lp) = synthetic_pair
        ip.write_bytes(ip.read_bytes()[:-5])
        with pytest.raises(MnistFormatError, match="truncated"):
            load_mnist_idx(ip, lp)

    def test_count_mismatch(self, tmp_path, synthetic_pair):
        pixels, labels, _ = synthetic_pair
        ip, lp = write_pair(tmp_path, pixels, labels[:-1], "bad")
        with pytest.raises(MnistFormatError, match="labels"):
            load_mnist_idx(ip, lp)

    def test_pixel_range(self, synthetic_pair):
        _, _, (ip, lp) = synthetic_pair
        px = load_mnist_idx(ip, lp).pixels
        assert px.dtype == np.uint8 and px.min() >= 0 and px.max() <= 255

    def test_image_shape_checked(self):
        with pytest.raises(MnistFormatError):
            MnistImage(np.zeros((27, 28), np.uint8), 3)

    def test_missing_dir(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_from_dir(tmp_path)


class TestDownsample:
    @pytest.mark.parametrize("side", [4, 8])
    def test_black_and_white(self, side):
        assert np.array_equal(downsample(np.zeros((28, 28)), side), np.zeros(side * side))
        assert np.allclose(downsample(np.full((28, 28), 255), side), 1, atol=1e-15)

    def test_single_corner_pixel(self):
        img = np.zeros((28, 28))
        img[0, 0] = 255
        out = downsample(img, 4)
        assert out[0] == pytest.approx(1 / 49, abs=1e-15)
        assert np.all(out[1:] == 0)

    def test_fractional_cells_split_pixel(self):
        img = np.zeros((28, 28))
        img[3, 3] = 255          # straddles the four cells around (0.5, 0.5) at side 8
        out = downsample(img, 8).reshape(8, 8)
        assert np.allclose(out[:2, :2], 0.25 / 3.5 ** 2, atol=1e-15)
        assert out.sum() == pytest.approx(1 / 3.5 ** 2)

    def test_bad_side(self):
        with pytest.raises(ValueError):
            downsample(np.zeros((28, 28)), 7)

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.uint8, (28, 28)), st.sampled_from([4, 8]))
    def test_mean_preserved(self, img, side):
        assert abs(downsample(img, side).mean() - img.mean() / 255) <= 1e-12

    def test_batch_matches_single(self):
        rng = np.random.default_rng(1)
        pixels = rng.integers(0, 256, (5, 28, 28), dtype=np.uint8)
        for side in (4, 8):
            batch = downsample_many(pixels, side)
            assert np.allclose(batch, [downsample(p, side) for p in pixels], atol=1e-14)


class TestSubdataset:
    def test_two_class_one_hot(self, synthetic_pair):
        pixels, labels, (ip, lp) = synthetic_pair
        imgs = load_mnist_idx(ip, lp)
        tr, te = make_subdataset(imgs, [3, 8], test_images=imgs)
        assert tr.n_features == 16 and tr.n_classes == 2
        assert tr.targets(2).shape == (len(tr), 2)
        assert set(np.unique(tr.targets(2).sum(axis=1))) == {1.0}

    def test_three_classes(self, synthetic_pair):
        *_, (ip, lp) = synthetic_pair
        imgs = load_mnist_idx(ip, lp)
        tr, _ = make_subdataset(imgs, [0, 3, 6], test_images=imgs)
        assert tr.targets(3).shape[1] == 3 and tr.n_features == 16

    def test_five_classes_use_8x8(self, synthetic_pair):
        *_, (ip, lp) = synthetic_pair
        imgs = load_mnist_idx(ip, lp)
        tr, _ = make_subdataset(imgs, [0, 1, 2, 3, 4], test_images=imgs)
        assert tr.n_features == 64

    def test_cap(self, mnist_images):
        tr, te = make_subdataset(mnist_images, [3, 8], per_class_cap=100, test_cap=20)
        assert tr.class_counts().max() <= 100 and te.class_counts().max() <= 20

    def test_split_is_disjoint(self, mnist_images):
        tr, te = make_subdataset(mnist_images, [3, 8], per_class_cap=50, test_cap=20)
        a = {r.tobytes() for r in tr.features}
        assert not any(r.tobytes() in a for r in te.features)

    def test_unknown_digit(self, synthetic_pair):
        *_, (ip, lp) = synthetic_pair
        imgs = load_mnist_idx(ip, lp)
        with pytest.raises(ValueError):
            make_subdataset(imgs, [3, 11])
        with pytest.raises(ValueError):
            make_subdataset(imgs, [3])

    def test_deterministic(self, mnist_images):
        a = make_subdataset(mnist_images, [3, 8], per_class_cap=40, seed=3)
        b = make_subdataset(mnist_images, [3, 8], per_class_cap=40, seed=3)
        assert a[0].digest() == b[0].digest() and a[1].digest() == b[1].digest()
