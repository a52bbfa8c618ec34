#!/usr/bin/env python3
"""Rebuild gzipped IDX files from the 10,000 MNIST digits bundled in the
`mnist` npm package (pixel values stored as byte/255 rounded to 3 decimals,
which recovers the original bytes exactly).

    npm pack mnist && tar xzf mnist-1.1.0.tgz
    python3 scripts/make_mnist_idx.py package/src/digits data/mnist
"""
import gzip
import json
import struct
import sys
from pathlib import Path


def main(digits_dir: Path, out_dir: Path) -> None:
    images = bytearray()
    labels = bytearray()
    for digit in range(10):
        data = json.loads((digits_dir / f"{digit}.json").read_text())["data"]
        assert len(data) % 784 == 0
        for v in data:
            b = round(v * 255)
            assert abs(v * 255 - b) < 0.25 and 0 <= b <= 255
            images.append(b)
        labels.extend([digit] * (len(data) // 784))
    n = len(labels)
    out_dir.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(out_dir / "mnist10k-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28) + bytes(images))
    with gzip.GzipFile(out_dir / "mnist10k-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, n) + bytes(labels))
    print(f"wrote {n} images to {out_dir}")


if __name__ == "__main__":
    main(Path(sys.argv[1]), Path(sys.argv[2]))
