"""Synthetic benchmark datasets and MNIST digit subsets."""

from softq.data.mnist import (
    MnistFormatError,
    MnistImage,
    MnistImages,
    downsample,
    fetch_mnist,
    load_mnist_idx,
    make_subdataset,
)
from softq.data.synthetic import Dataset, circles_dataset, moons_dataset, xor_dataset

__all__ = [
    "Dataset",
    "MnistFormatError",
    "MnistImage",
    "MnistImages",
    "circles_dataset",
    "downsample",
    "fetch_mnist",
    "load_mnist_idx",
    "make_subdataset",
    "moons_dataset",
    "xor_dataset",
]
