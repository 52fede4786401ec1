"""Deterministic synthetic grayscale corpora.

Desk-scale stand-in for photographic test sets: smooth low-frequency fields
with optional texture and hard-clipped bright/dark patches. The saturation
level in [0, 1] controls how much of each image sits against the range
limits, which is what drives reconstruction overflow after compression.
"""

import json
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter, zoom

from .containers import write_pgm
from .jpegmodel import ParameterError, SpatialImage

__all__ = ["synthesize_image", "make_test_corpus", "load_manifest"]


def synthesize_image(seed, index, size=64, saturation=0.5):
    """One deterministic synthetic image in the level-shifted spatial domain."""
    if size % 8 or size <= 0:
        raise ParameterError("size must be a positive multiple of 8")
    if not 0.0 <= saturation <= 1.0:
        raise ParameterError("saturation must lie in [0, 1]")
    rng = np.random.default_rng([int(seed), int(index)])

    coarse = rng.normal(0.0, 1.0, (size // 8 + 2, size // 8 + 2))
    base = zoom(coarse, size / coarse.shape[0], order=3)[:size, :size]
    base = base / max(np.abs(base).max(), 1e-9)
    amplitude = 60.0 + 50.0 * saturation
    img = 128.0 + amplitude * base

    # Near-limit regions: soft-rimmed flat areas hugging the range limits.
    # Reconstruction error peaks at block edges there, which is what makes
    # post-compression overflow boundary-heavy, as in photographic content.
    n_patches = int(round(8 * saturation))
    for _ in range(n_patches):
        ph = int(rng.integers(size // 4, max(size // 4 + 1, 3 * size // 4)))
        pw = int(rng.integers(size // 4, max(size // 4 + 1, 3 * size // 4)))
        r0 = int(rng.integers(0, size - ph + 1))
        c0 = int(rng.integers(0, size - pw + 1))
        if rng.random() < 0.5:
            level = float(rng.uniform(250.0, 255.0))
        else:
            level = float(rng.uniform(0.0, 5.0))
        mask = np.zeros((size, size))
        mask[r0 : r0 + ph, c0 : c0 + pw] = 1.0
        mask = gaussian_filter(mask, 2.0)
        img = img * (1.0 - mask) + level * mask

    img += rng.normal(0.0, 2.0, (size, size))
    img = np.clip(img, 0.0, 255.0)
    return SpatialImage(img - 128.0)


def make_test_corpus(out_dir, count, saturation, seed, size=64):
    """Write `count` PGM images plus a JSON manifest; fully seed-determined."""
    if count <= 0:
        raise ParameterError("count must be positive")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for index in range(count):
        name = f"img_{index:04d}.pgm"
        write_pgm(out / name, synthesize_image(seed, index, size, saturation))
        entries.append({"id": index, "file": name})
    manifest = {
        "count": count,
        "saturation": saturation,
        "seed": int(seed),
        "size": size,
        "images": entries,
    }
    with open(out / "manifest.json", "w", encoding="ascii") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_manifest(corpus_dir):
    path = Path(corpus_dir) / "manifest.json"
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)
