#!/usr/bin/env python3
"""Fuzz campaign over the reading-order pipeline, with a summary report.

Runs three experiment families and prints agreement rates:

  grids      axis-aligned grids vs the row-band-then-x oracle
  baselines  skewed baselines (up to +/-40 deg) vs the projection-sort oracle
  noise      jittered grids: how often ordering survives, swept over sigma

Useful for re-checking the frozen acceptance thresholds after touching the
geometry, e.g.:

    python scripts/fuzz_ordering_report.py --cases 2000 --seed 1
"""

import argparse
import math
import random
import sys
import time

from slatepoet.geometry import DetectedMarker, GeometryConfig, Point2, order_markers
from slatepoet.simulate import NoiseModel, generate_grid, synthesize

TILE_W, TILE_H = 60.0, 20.0
CONFIG = GeometryConfig(k=1000.0)


def tile(word_id, cx, cy, rotation=0.0):
    hw, hh = TILE_W / 2, TILE_H / 2
    local = [(-hw, hh), (hw, hh), (hw, -hh), (-hw, -hh)]
    c, s = math.cos(rotation), math.sin(rotation)
    corners = tuple(Point2(cx + x * c - y * s, cy + x * s + y * c) for x, y in local)
    return DetectedMarker(word_id, Point2(cx, cy), corners)


def fuzz_grids(rng, cases):
    mismatches = 0
    for _ in range(cases):
        rows = rng.randint(1, 5)
        y = rng.uniform(-100, 100)
        scene, bands = [], []
        for r in range(rows):
            cols = rng.randint(1, 5)
            x0 = rng.uniform(-200, 200)
            spacing = rng.uniform(62, 150)
            band = []
            for c in range(cols):
                wid = f"r{r}c{c}"
                scene.append(tile(wid, x0 + c * spacing, y))
                band.append((x0 + c * spacing, wid))
            bands.append((y, band))
            y -= rng.uniform(2 * TILE_H + 1, 160)
        bands.sort(key=lambda b: -b[0])
        expected = [wid for _, band in bands for _, wid in sorted(band)]
        rng.shuffle(scene)
        if order_markers(scene, CONFIG).flattened() != expected:
            mismatches += 1
    return mismatches


def fuzz_baselines(rng, cases):
    mismatches = 0
    for _ in range(cases):
        angle = math.radians(rng.uniform(-40, 40))
        d = (math.cos(angle), math.sin(angle))
        n_vec = (-math.sin(angle), math.cos(angle))
        scene, groups = [], []
        offset = 0.0
        for li in range(rng.randint(1, 3)):
            count = rng.randint(1, 6)
            spacing = rng.uniform(65, 120)
            shift = rng.uniform(-100, 100)
            group = []
            for i in range(count):
                along = shift + i * spacing
                cx = along * d[0] + offset * n_vec[0]
                cy = along * d[1] + offset * n_vec[1]
                wid = f"l{li}t{i}"
                scene.append(tile(wid, cx, cy, rotation=angle))
                group.append((cx, cy, wid))
            groups.append(group)
            offset -= rng.uniform(60, 150)
        groups.sort(key=lambda g: -max(cy for _, cy, _ in g))
        expected = [
            wid for g in groups
            for _, _, wid in sorted(g, key=lambda t: t[0] * d[0] + t[1] * d[1])
        ]
        rng.shuffle(scene)
        if order_markers(scene, CONFIG).flattened() != expected:
            mismatches += 1
    return mismatches


def sweep_noise(trials):
    poses = generate_grid(3, 3, (70.0, 1.5 * TILE_H), tile_size=(TILE_W, TILE_H))
    expected = [p.word_id for p in poses]
    print("  sigma/tile_height  preserved")
    for sigma_frac in (0.005, 0.01, 0.02, 0.04, 0.08):
        ok = 0
        for seed in range(trials):
            snap = synthesize(poses, NoiseModel(corner_jitter_sigma=sigma_frac * TILE_H,
                                                rng_seed=seed))
            if order_markers(snap.detections, CONFIG).flattened() == expected:
                ok += 1
        print(f"  {sigma_frac:>16.3f}  {ok}/{trials}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=1000)
    parser.add_argument("--trials", type=int, default=1000, help="noise trials per sigma")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = random.Random(args.seed)
    t0 = time.perf_counter()
    bad = fuzz_grids(rng, args.cases)
    print(f"grids:     {args.cases - bad}/{args.cases} match the row-band oracle "
          f"({time.perf_counter() - t0:.2f}s)")

    t0 = time.perf_counter()
    bad = fuzz_baselines(rng, args.cases)
    print(f"baselines: {args.cases - bad}/{args.cases} match the projection oracle "
          f"({time.perf_counter() - t0:.2f}s)")

    print("noise sweep on a 3x3 grid at 1.5 tile-height separation:")
    sweep_noise(args.trials)
    return 0


if __name__ == "__main__":
    sys.exit(main())
