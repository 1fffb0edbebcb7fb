#!/usr/bin/env python3
"""Build the small IDX-format MNIST fixture used by the test suite.

The fixture is the 5000-image MNIST subset shipped inside the mlxtend wheel
(500 images per digit). Images are split alternately per digit into a
2500-image "train" file and a 2500-image "t10k" file and written as gzipped
IDX files with the standard MNIST names.

Usage: make_mnist_fixture.py <mlxtend wheel> <output dir>
"""
import gzip
import io
import struct
import sys
import zipfile

import numpy as np


def write_idx(path, data, magic):
    header = struct.pack(">I", magic) + b"".join(struct.pack(">I", d) for d in data.shape)
    with gzip.GzipFile(path, "wb", mtime=0) as f:
        f.write(header + data.astype(np.uint8).tobytes())


def main():
    wheel, out = sys.argv[1], sys.argv[2]
    raw = zipfile.ZipFile(wheel).read("mlxtend/data/data/mnist_5k.csv.gz")
    table = np.loadtxt(io.StringIO(gzip.decompress(raw).decode()), delimiter=",", dtype=np.int64)
    pixels, labels = table[:, :-1], table[:, -1]
    train, test = [], []
    for digit in range(10):
        idx = np.flatnonzero(labels == digit)
        train.extend(idx[0::2])
        test.extend(idx[1::2])
    for prefix, rows in (("train", np.array(train)), ("t10k", np.array(test))):
        write_idx(f"{out}/{prefix}-images-idx3-ubyte.gz", pixels[rows].reshape(-1, 28, 28), 0x00000803)
        write_idx(f"{out}/{prefix}-labels-idx1-ubyte.gz", labels[rows], 0x00000801)


if __name__ == "__main__":
    main()
