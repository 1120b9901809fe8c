#!/usr/bin/env python3
"""Pulse width against error rate and energy, one table per chip model.

The interesting corners: 2.5 ns corrupts roughly a third of all bits,
5 ns buys an 88 percent energy cut for a few percent of bad bits, 10 ns
is nearly clean and 15 ns is the rated pulse with no failures at all.
Energy columns come from the write-current curve and only cover its
sampled range.
"""

import argparse

from mramsim import (
    DEFAULT_CURVE,
    PowerModelError,
    create_chip,
    current_saving,
    get_profile,
    power_reduction,
    sweep_t_w,
)

MODELS = ("C1", "C2", "C3", "C4", "C5")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--capacity", type=int, default=65536)
    parser.add_argument(
        "--tw", type=float, nargs="+", default=[2.5, 5.0, 10.0, 15.0]
    )
    args = parser.parse_args()

    t_full = DEFAULT_CURVE.t_max
    header = f"{'t_w ns':>8} {'bad bits %':>12} {'I saving %':>12} {'P saving %':>12}"
    for model_id in MODELS:
        profile = get_profile(model_id, capacity_words=args.capacity)
        points = sweep_t_w(
            lambda: create_chip(profile, args.seed), args.tw
        )
        print(f"\n{model_id} (seed {args.seed}, {args.capacity} words)")
        print(header)
        for point in points:
            try:
                saving = 100.0 * current_saving(DEFAULT_CURVE, point.t_w_ns, t_full)
                reduction = 100.0 * power_reduction(DEFAULT_CURVE, point.t_w_ns, t_full)
                energy = f"{saving:12.2f} {reduction:12.2f}"
            except PowerModelError:
                energy = f"{'-':>12} {'-':>12}"
            print(
                f"{point.t_w_ns:8.2f} {100.0 * point.failed_bit_fraction:12.4f} "
                f"{energy}"
            )


if __name__ == "__main__":
    main()
