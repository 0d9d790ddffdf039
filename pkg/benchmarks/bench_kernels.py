"""Compare the compiled and pure-Python kernels on a representative frame.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from vogtrack import kernels
from vogtrack.image import downscale, isodata_threshold
from vogtrack.synth import EyeScene, render


def workload():
    img, truth = render(EyeScene(noise_sigma=8.0))
    small = downscale(img, 8)
    t = isodata_threshold(small)
    mask = np.ascontiguousarray(small.pixels <= t)
    xc, yc = (int(round(v)) for v in truth.pupil_center)
    bbox = (200, 150, 440, 430)
    return img.pixels, mask, t, (xc, yc), bbox


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    px, mask, t, (xc, yc), bbox = workload()
    found = kernels.backends()
    calls = {
        "block_mean": lambda m: m.block_mean(px, 8),
        "label8": lambda m: m.label8(mask),
        "zigzag": lambda m: m.zigzag(px, float(t), 200.0, xc, yc - 40, bbox, 3),
    }
    print(f"{'kernel':<12}" + "".join(f"{name:>12}" for name in found) + "     speedup")
    for kname, call in calls.items():
        us = {}
        for bname, mod in found.items():
            best = min(timeit.repeat(lambda: call(mod), number=args.repeat, repeat=3))
            us[bname] = best / args.repeat * 1e6
        row = f"{kname:<12}" + "".join(f"{us[b]:10.1f}us" for b in found)
        if "cython" in us:
            row += f"  {us['python'] / us['cython']:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
