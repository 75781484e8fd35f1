"""Build the bundled offline MNIST sample from the npm `mnist` package.

The package (https://github.com/cazala/mnist, MIT) ships 10,000 MNIST digits
as JSON arrays of pixel/255 rounded to three decimals; round(v * 255) recovers
the original bytes exactly. The digits are shuffled with a fixed seed and split
5000/5000 into IDX files that use the official MNIST file names.

usage: python3 build_mnist_sample.py <path/to/package/src/digits> <out-dir>
"""
import gzip
import json
import struct
import sys

import numpy as np


def main(digits_dir, out_dir):
    images, labels = [], []
    for digit in range(10):
        with open(f"{digits_dir}/{digit}.json") as f:
            data = np.array(json.load(f)["data"], dtype=np.float64)
        n = len(data) // 784
        images.append(np.round(data * 255).astype(np.uint8).reshape(n, 28, 28))
        labels.append(np.full(n, digit, dtype=np.uint8))
    images = np.concatenate(images)
    labels = np.concatenate(labels)
    order = np.random.default_rng(20240101).permutation(len(labels))
    images, labels = images[order], labels[order]
    half = len(labels) // 2
    for prefix, sl in (("train", slice(0, half)), ("t10k", slice(half, None))):
        imgs, labs = images[sl], labels[sl]
        # mtime=0 keeps the archives byte-reproducible
        with gzip.GzipFile(f"{out_dir}/{prefix}-images-idx3-ubyte.gz", "wb", mtime=0) as f:
            f.write(struct.pack(">IIII", 2051, len(imgs), 28, 28))
            f.write(imgs.tobytes())
        with gzip.GzipFile(f"{out_dir}/{prefix}-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
            f.write(struct.pack(">II", 2049, len(labs)))
            f.write(labs.tobytes())


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
