#!/usr/bin/env python3
"""Convert the digit dumps shipped with the npm `mnist` package into IDX files.

Usage: make_mnist_idx.py <package>/src/digits <out_dir> [--train N] [--test N]

The package stores 10k MNIST digits as per-class JSON arrays of pixel
intensities scaled to [0,1] and rounded to three decimals; round(v*255)
recovers the original bytes exactly. Samples are shuffled with a fixed seed
and split into train/test IDX pairs (big-endian headers, magic 2051/2049).
"""
import argparse
import json
import random
import struct
from pathlib import Path


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(images), 28, 28))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(bytes(labels))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir")
    ap.add_argument("out_dir")
    ap.add_argument("--train", type=int, default=5000)
    ap.add_argument("--test", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=784)
    args = ap.parse_args()

    samples = []
    for label in range(10):
        raw = json.load(open(Path(args.digits_dir) / f"{label}.json"))["data"]
        for k in range(len(raw) // 784):
            px = [int(round(v * 255)) for v in raw[k * 784:(k + 1) * 784]]
            samples.append((px, label))
    random.Random(args.seed).shuffle(samples)
    if args.train + args.test > len(samples):
        raise SystemExit(f"only {len(samples)} samples available")

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train = samples[:args.train]
    test = samples[args.train:args.train + args.test]
    write_images(out / "train-images-idx3-ubyte", [s[0] for s in train])
    write_labels(out / "train-labels-idx1-ubyte", [s[1] for s in train])
    write_images(out / "t10k-images-idx3-ubyte", [s[0] for s in test])
    write_labels(out / "t10k-labels-idx1-ubyte", [s[1] for s in test])
    print(f"wrote {len(train)} train / {len(test)} test samples to {out}")


if __name__ == "__main__":
    main()
