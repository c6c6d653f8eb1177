#!/usr/bin/env python3
"""Transform recovery under increasing corruption.

Each trial plants a random shift+scale, derives a degraded probe set from a
random reference set, and checks whether matching recovers the transform to
2% scale / 2 px shift. The sequential screen is corruption-matched: at
heavy dropout the default prune floor would discard true branches whose
most confident edges happen to be missing, so the floor scales down as
dropout goes up.
"""

import argparse
import math
import sys

import numpy as np

from edgematch import (
    CorruptionSpec,
    Transform,
    VerifyConfig,
    corrupt_and_transform,
    match,
    random_edge_set,
)


def screen_for(dropout: float) -> VerifyConfig:
    # At dropout p a branch must survive ~binomial(probe_count, p) misses;
    # give it the same headroom the defaults grant at p ~ 0.1.
    if dropout <= 0.12:
        return VerifyConfig()
    return VerifyConfig(prune_threshold=0.05)


def run_level(dropout: float, trials: int, n_edges: int, seed_base: int):
    accepted = 0
    good = 0
    s_errs = []
    shift_errs = []
    cfg = screen_for(dropout)
    for trial in range(trials):
        rng = np.random.default_rng(seed_base + trial)
        truth = Transform(
            s=float(rng.uniform(0.7, 1.4)),
            tx=float(rng.uniform(-15.0, 15.0)),
            ty=float(rng.uniform(-15.0, 15.0)),
        )
        ref = random_edge_set(n_edges, 256, 256, seed=seed_base + 1000 + trial)
        probe = corrupt_and_transform(
            ref, truth,
            CorruptionSpec(dropout=dropout, jitter_pos=0.5, jitter_theta=0.05,
                           clutter_frac=0.10, seed=seed_base + 3000 + trial),
            384, 384,
        )
        res = match(ref, probe, ver_cfg=cfg)
        if not res.decided:
            continue
        accepted += 1
        s_err = abs(res.transform.s - truth.s) / truth.s
        shift = math.hypot(res.transform.tx - truth.tx, res.transform.ty - truth.ty)
        s_errs.append(s_err)
        shift_errs.append(shift)
        if s_err <= 0.02 and shift <= 2.0:
            good += 1
    return accepted, good, s_errs, shift_errs


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--edges", type=int, default=300)
    ap.add_argument("--dropout", default="0.0,0.1,0.25,0.4",
                    help="comma-separated dropout levels")
    ap.add_argument("--seed-base", type=int, default=500)
    ap.add_argument("--out", help="write per-level results as CSV")
    args = ap.parse_args(argv)

    levels = [float(t) for t in args.dropout.split(",") if t]
    print(f"{'dropout':>8} {'accepted':>9} {'recovered':>10} "
          f"{'median s err':>13} {'median shift':>13}")
    rows = ["dropout,accepted,recovered,trials,median_s_err,median_shift_px"]
    for dropout in levels:
        accepted, good, s_errs, shift_errs = run_level(
            dropout, args.trials, args.edges, args.seed_base
        )
        med_s = float(np.median(s_errs)) if s_errs else float("nan")
        med_t = float(np.median(shift_errs)) if shift_errs else float("nan")
        print(f"{dropout:>8.2f} {accepted:>4d}/{args.trials:<4d} "
              f"{good:>5d}/{args.trials:<4d} {med_s:>12.4%} {med_t:>11.3f}px")
        rows.append(f"{dropout},{accepted},{good},{args.trials},{med_s!r},{med_t!r}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write("\n".join(rows) + "\n")
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
