"""The five-resolution candidate gallery and maxmin-cut selection.

A cluttered scene is reduced to 1/2 .. 1/10, each reduction is classified
into figure and ground, and the candidate whose foreground sits farthest
from its background (in mean patch color) wins. Reductions that produce too
few patches are skipped, which is exactly what happens to the coarsest
scales of small images.
"""

import os

from matteforge.imaging import save_image_png
from matteforge.multires import generate_candidates, override_selection, save_candidate_gallery, select
from matteforge.synthetic import disk_scene

OUT = os.path.join(os.path.dirname(__file__), "output", "candidates")
os.makedirs(OUT, exist_ok=True)

img, gt, box = disk_scene(200, seed=7)
save_image_png(img, os.path.join(OUT, "scene.png"))

cs = generate_candidates(img, box)
cs = override_selection(cs, select(cs))

print(f"{'factor':>8} {'patches':>8} {'score':>10} {'state':>10}")
for i, cand in enumerate(cs.candidates):
    state = "selected" if i == cs.selected_index else ("skipped" if cand.skipped else "viable")
    score = "-" if cand.skipped else f"{cand.score:.2f}"
    print(f"    1/{cand.factor:<4} {cand.patch_count:>8} {score:>10} {state:>10}")

save_candidate_gallery(cs, OUT)
print(f"gallery written to {OUT}")
