#!/usr/bin/env python3
"""Survey write-error rates across the built-in chip models.

Runs the n-round characterization protocol on every model over a handful
of master seeds and tabulates single-shot bit rate, accumulated bit rate
and accumulated address rate against the catalog figures. The medians
should sit within a few percent of the catalog at full capacity; smaller
--capacity runs are faster but noisier.
"""

import argparse
import statistics

from mramsim import CHARACTERIZATION_TARGETS, characterize, create_chip, get_profile


def survey_model(model_id, capacity, n, seeds, t_w):
    profile = get_profile(model_id, capacity_words=capacity)
    single, bits, addrs = [], [], []
    for seed in seeds:
        chip = create_chip(profile, seed)
        errmap = characterize(chip, t_w, n, 0x0000)
        cells = capacity * 16
        single.append(100.0 * errmap.per_measurement_counts[0] / cells)
        union_bits = sum(m.bit_count() for m in errmap.erroneous.values())
        bits.append(100.0 * union_bits / cells)
        addrs.append(100.0 * len(errmap.erroneous) / capacity)
    return (
        statistics.median(single),
        statistics.median(bits),
        statistics.median(addrs),
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--capacity", type=int, default=65536)
    parser.add_argument("--n", type=int, default=50, help="measurement rounds")
    parser.add_argument("--tw", type=float, default=5.0)
    parser.add_argument(
        "--seeds", type=int, nargs="+", default=[0, 1, 2, 3, 4]
    )
    args = parser.parse_args()

    print(
        f"capacity {args.capacity} words, n = {args.n}, "
        f"t_w = {args.tw} ns, seeds {args.seeds}"
    )
    print(f"{'model':<6} {'single-shot %':>14} {'union bits %':>18} {'union addrs %':>18}")
    for model_id in sorted(CHARACTERIZATION_TARGETS):
        target = CHARACTERIZATION_TARGETS[model_id]
        m_b, e_b, e_a = survey_model(
            model_id, args.capacity, args.n, args.seeds, args.tw
        )
        print(
            f"{model_id:<6} {m_b:6.2f} ({target.single_shot_bit_pct:5.2f})"
            f"  {e_b:8.2f} ({target.union_bit_pct:5.2f})"
            f"  {e_a:8.2f} ({target.union_addr_pct:5.2f})"
        )
    print("catalog figures in parentheses")


if __name__ == "__main__":
    main()
