"""MNIST IDX files and the downsampled digit subsets built from them."""

from __future__ import annotations

import gzip
import hashlib
import logging
import struct
import urllib.request
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from softq.data.synthetic import Dataset

log = logging.getLogger(__name__)

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801
SIDE = 28

STANDARD_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}
SUBSET_FILES = {"images": "mnist5k-images-idx3-ubyte", "labels": "mnist5k-labels-idx1-ubyte"}
MIRRORS = (
    "https://storage.googleapis.com/cvdf-datasets/mnist/",
    "https://ossci-datasets.s3.amazonaws.com/mnist/",
)


class MnistFormatError(ValueError):
    pass


@dataclass(frozen=True)
class MnistImage:
    pixels: np.ndarray
    label: int

    def __post_init__(self):
        if self.pixels.shape != (SIDE, SIDE):
            raise MnistFormatError(f"MNIST image must be 28x28, got {self.pixels.shape}")


@dataclass(frozen=True)
class MnistImages:
    """Sequence of :class:`MnistImage` backed by two arrays."""

    pixels: np.ndarray    # (N, 28, 28) uint8
    labels: np.ndarray    # (N,) uint8
    digest: str = ""

    def __len__(self) -> int:
        return self.labels.shape[0]

    def __getitem__(self, k) -> MnistImage:
        return MnistImage(self.pixels[k], int(self.labels[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))


def _read_bytes(path) -> bytes:
    path = Path(path)
    if not path.exists() and path.with_name(path.name + ".gz").exists():
        path = path.with_name(path.name + ".gz")
    raw = path.read_bytes()
    return gzip.decompress(raw) if raw[:2] == b"\x1f\x8b" else raw


def _parse(raw: bytes, magic: int, ndims: int, name: str) -> np.ndarray:
    header = 4 + 4 * ndims
    if len(raw) < header:
        raise MnistFormatError(f"{name}: truncated header")
    got = struct.unpack(">I", raw[:4])[0]
    if got != magic:
        raise MnistFormatError(f"{name}: bad magic 0x{got:08x}, expected 0x{magic:08x}")
    dims = struct.unpack(f">{ndims}I", raw[4:header])
    size = int(np.prod(dims))
    if len(raw) - header < size:
        raise MnistFormatError(f"{name}: truncated, header promises {size} bytes, file has {len(raw) - header}")
    if len(raw) - header > size:
        raise MnistFormatError(f"{name}: {len(raw) - header - size} trailing bytes after payload")
    return np.frombuffer(raw, dtype=np.uint8, offset=header).reshape(dims)


def load_mnist_idx(images_path, labels_path) -> MnistImages:
    """Parse a pair of IDX files (optionally gzipped)."""
    raw_i, raw_l = _read_bytes(images_path), _read_bytes(labels_path)
    images = _parse(raw_i, IMAGE_MAGIC, 3, str(images_path))
    labels = _parse(raw_l, LABEL_MAGIC, 1, str(labels_path))
    if images.shape[0] != labels.shape[0]:
        raise MnistFormatError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    if images.shape[1:] != (SIDE, SIDE):
        raise MnistFormatError(f"images are {images.shape[1:]}, expected 28x28")
    if labels.size and labels.max() > 9:
        raise MnistFormatError("label outside 0..9")
    digest = hashlib.sha256(raw_i + raw_l).hexdigest()[:16]
    return MnistImages(images, labels, digest)


def write_idx_images(path, pixels) -> Path:
    pixels = np.asarray(pixels, dtype=np.uint8)
    path = Path(path)
    path.write_bytes(struct.pack(">4I", IMAGE_MAGIC, *pixels.shape) + pixels.tobytes())
    return path


def write_idx_labels(path, labels) -> Path:
    labels = np.asarray(labels, dtype=np.uint8)
    path = Path(path)
    path.write_bytes(struct.pack(">2I", LABEL_MAGIC, labels.shape[0]) + labels.tobytes())
    return path


def _area_weights(side: int) -> np.ndarray:
    """``(side, 28)`` matrix averaging pixels into ``side`` equal-width cells."""
    width = SIDE / side
    w = np.zeros((side, SIDE))
    for k in range(side):
        lo, hi = k * width, (k + 1) * width
        for c in range(SIDE):
            w[k, c] = max(0.0, min(hi, c + 1) - max(lo, c))
    return w / width


def downsample(img, side: int = 4) -> np.ndarray:
    """Area-weighted block average of a 28x28 image as a flat row-major vector in [0, 1].

    Cells are exactly 7x7 pixels for ``side=4``; for ``side=8`` each cell is
    3.5 pixels wide and border pixels contribute by overlap fraction.
    """
    if side not in (4, 8):
        raise ValueError("downsample side must be 4 or 8")
    pixels = img.pixels if isinstance(img, MnistImage) else np.asarray(img)
    w = _area_weights(side)
    return (w @ pixels.astype(float) @ w.T / 255.0).ravel()


def downsample_many(pixels: np.ndarray, side: int = 4) -> np.ndarray:
    if side not in (4, 8):
        raise ValueError("downsample side must be 4 or 8")
    w = _area_weights(side)
    out = np.einsum("ka,nab,lb->nkl", w, pixels.astype(float), w) / 255.0
    return out.reshape(pixels.shape[0], side * side)


def default_side(n_classes: int) -> int:
    return 4 if n_classes <= 3 else 8


def _select(images: MnistImages, classes, cap, rng) -> np.ndarray:
    picks = []
    for digit in classes:
        idx = np.flatnonzero(images.labels == digit)
        if cap is not None and idx.size > cap:
            idx = np.sort(rng.choice(idx, size=cap, replace=False))
        picks.append(idx)
    return np.concatenate(picks)


def make_subdataset(images: MnistImages, classes, per_class_cap: int | None = None, seed: int = 0,
                    test_images: MnistImages | None = None, side: int | None = None,
                    test_fraction: float = 0.2, test_cap: int | None = None) -> tuple[Dataset, Dataset]:
    """Digits ``classes`` relabelled ``0..len(classes)-1``.

    With ``test_images`` the two sources are the train and test splits.
    Without it, each class of ``images`` is shuffled and split by
    ``test_fraction`` (used for the bundled 5000-image subset).
    """
    classes = [int(c) for c in classes]
    if not 2 <= len(classes) <= 5:
        raise ValueError("subdatasets hold 2 to 5 digit classes")
    if len(set(classes)) != len(classes) or any(not 0 <= c <= 9 for c in classes):
        raise ValueError(f"bad digit list {classes}")
    side = default_side(len(classes)) if side is None else side
    rng = np.random.default_rng(seed)
    to_class = {d: k for k, d in enumerate(classes)}

    if test_images is None:
        tr, te = [], []
        for digit in classes:
            idx = rng.permutation(np.flatnonzero(images.labels == digit))
            n_test = int(round(test_fraction * idx.size))
            te.append(idx[:n_test][:test_cap])
            tr.append(idx[n_test:][:per_class_cap])
        tr_idx, te_idx = np.sort(np.concatenate(tr)), np.sort(np.concatenate(te))
        test_images = images
    else:
        tr_idx = _select(images, classes, per_class_cap, rng)
        te_idx = _select(test_images, classes, test_cap, rng)

    def build(src: MnistImages, idx, split):
        if idx.size == 0:
            raise ValueError(f"no {split} images for digits {classes}")
        x = downsample_many(src.pixels[idx], side)
        y = np.array([to_class[int(d)] for d in src.labels[idx]])
        prov = {"source": "mnist", "digest": src.digest, "classes": classes, "side": side, "seed": seed}
        return Dataset(x, y, len(classes), split, prov)

    return build(images, tr_idx, "train"), build(test_images, te_idx, "test")


def bundled_subset_path() -> Path | None:
    """Location of the 5000-image MNIST subset shipped inside ``mlxtend``, if installed."""
    import importlib.util

    found = importlib.util.find_spec("mlxtend")
    if found is None or found.origin is None:
        return None
    path = Path(found.origin).parent / "data" / "data" / "mnist_5k.csv.gz"
    return path if path.exists() else None


def fetch_mnist(dest, timeout: float = 20.0) -> dict:
    """Place MNIST IDX files under ``dest``.

    Tries the standard download mirrors first; if none is reachable, writes
    the bundled 5000-image subset as an IDX pair.
    """
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    for base in MIRRORS:
        try:
            for name in STANDARD_FILES.values():
                target = dest / name
                if not target.exists():
                    with urllib.request.urlopen(base + name + ".gz", timeout=timeout) as r:
                        target.write_bytes(gzip.decompress(r.read()))
            return {k: str(dest / v) for k, v in STANDARD_FILES.items()}
        except OSError as exc:
            log.warning("MNIST mirror %s unavailable: %s", base, exc)
    src = bundled_subset_path()
    if src is None:
        raise FileNotFoundError("no MNIST mirror reachable and mlxtend's bundled subset is not installed")
    with gzip.open(src, "rt") as f:
        table = np.loadtxt(f, delimiter=",")
    pixels = table[:, :-1].reshape(-1, SIDE, SIDE).astype(np.uint8)
    labels = table[:, -1].astype(np.uint8)
    write_idx_images(dest / SUBSET_FILES["images"], pixels)
    write_idx_labels(dest / SUBSET_FILES["labels"], labels)
    return {k: str(dest / v) for k, v in SUBSET_FILES.items()}


def load_from_dir(root) -> tuple[MnistImages, MnistImages | None]:
    """Standard train/test pair if present under ``root``, else the 5k subset."""
    root = Path(root)
    std = {k: root / v for k, v in STANDARD_FILES.items()}
    if all(p.exists() or p.with_name(p.name + ".gz").exists() for p in std.values()):
        return (load_mnist_idx(std["train_images"], std["train_labels"]),
                load_mnist_idx(std["test_images"], std["test_labels"]))
    sub = {k: root / v for k, v in SUBSET_FILES.items()}
    if all(p.exists() for p in sub.values()):
        return load_mnist_idx(sub["images"], sub["labels"]), None
    raise FileNotFoundError(f"no MNIST IDX files under {root}")
