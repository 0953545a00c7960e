import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from matteforge.superpixel import PatchMap, PatchStats


@pytest.fixture(scope="session")
def disk_corpus(tmp_path_factory):
    """10 disk-on-texture scenes at 200x200 written with a manifest."""
    from matteforge.synthetic import build_disk_corpus

    root = tmp_path_factory.mktemp("disk_corpus")
    manifest = build_disk_corpus(root, count=10, size=200, seed=7)
    return manifest


@pytest.fixture(scope="session")
def trend_corpus():
    """20 cluttered mosaics for the multi-resolution trend checks."""
    from matteforge.synthetic import cluttered_texture

    return [cluttered_texture(240, seed=100 + i) for i in range(20)]


def make_patchmap(labels, lab_colors):
    """Hand-build a PatchMap from a label raster and per-patch Lab colors."""
    labels = np.asarray(labels, dtype=np.int32)
    count = int(labels.max()) + 1
    ys, xs = np.mgrid[0 : labels.shape[0], 0 : labels.shape[1]]
    patches = []
    for i in range(count):
        sel = labels == i
        patches.append(
            PatchStats(
                id=i,
                area=int(sel.sum()),
                mean_lab=tuple(float(v) for v in lab_colors[i]),
                centroid=(float(xs[sel].mean()), float(ys[sel].mean())),
            )
        )
    return PatchMap(labels, patches)
