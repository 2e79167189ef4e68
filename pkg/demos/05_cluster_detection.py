"""Density-based detection of the clustering onset.

Dumps the frames of a short trajectory and walks them with DBSCAN at the
particle-count-scaled detection thresholds: the initial uniform frame shows
no clusters; the onset is the first frame where one appears.

Run:  python3 demos/05_cluster_detection.py   (about half a minute)
"""

import numpy as np

from torusclusters import Gaussian
from torusclusters.clustering import DbscanParams, dbscan, onset_time
from torusclusters.simulator import SimConfig, run

BOX = 10.0
cfg = SimConfig(
    n_particles=400,
    potential=Gaussian(0.5),
    dims=1,
    box=BOX,
    beta=25.0,
    gamma=1.0,
    h=0.25,
    n_steps=160,
    print_every=8,
    seed=11,
    dump_trajectory=True,
)
record = run(cfg)

params = DbscanParams.from_dimensionless(0.05, 0.18, n=cfg.n_particles, box=BOX)
print(f"detection parameters: eps = {params.eps}, min_pts = {params.min_pts}")
print("frame-by-frame cluster counts:")
for time, positions in record.frames:
    labels = dbscan(positions, BOX, params)
    n_noise = int(np.sum(labels.labels == -1))
    print(f"  t = {time:5.1f}: {labels.n_clusters} cluster(s), {n_noise} noise points")

t_on = onset_time(record.frames, BOX, eps_tilde=0.05, min_pts_tilde=0.18)
print(f"\nonset of clustering detected at t = {t_on}")
