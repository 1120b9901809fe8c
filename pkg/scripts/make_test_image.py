#!/usr/bin/env python3
"""Generate the deterministic 90x90 grayscale test image.

The scene mixes the regions that matter for approximate-write studies:
a dark disk and a dark bar (few set bits per pixel, so writes on an
all-ones background must toggle nearly the whole word), a bright plate
(few toggles, heavily relieved), and a smooth diagonal gradient in
between. Roughly a quarter of the pixels are dark. No randomness; the
same file comes out on every run.
"""

import argparse
from pathlib import Path

import numpy as np

from mramsim import ImageBuffer, write_pgm

SIZE = 90


def build_image() -> ImageBuffer:
    y, x = np.mgrid[0:SIZE, 0:SIZE]
    img = (120.0 + (x + y) * (110.0 / (2 * (SIZE - 1)))).astype(np.float64)

    # black disk, upper left; zero pixels leave a word write no relief at
    # all on an all-ones background, the worst case for reduced pulses
    disk = (y - 30) ** 2 + (x - 30) ** 2 <= 18 ** 2
    img[disk] = 0.0

    # dark vertical bar to the right of the disk
    bar = (x >= 60) & (x <= 68)
    img[bar] = 12.0

    # bright plate, lower left corner
    plate = (y >= 68) & (x <= 20)
    img[plate] = 250.0

    # checkerboard texture strip along the bottom edge
    strip = y >= 84
    img[strip] = np.where(((x + y) % 2 == 0)[strip], 64.0, 192.0)

    return ImageBuffer(np.clip(np.rint(img), 0, 255).astype(np.uint8))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "out", nargs="?", default="testimage.pgm", help="output PGM path"
    )
    args = parser.parse_args()

    image = build_image()
    write_pgm(image, args.out)
    dark = int((image.pixels < 32).sum())
    print(
        f"{Path(args.out).name}: {image.width}x{image.height}, "
        f"{dark} dark pixels (<32), mean {image.pixels.mean():.1f}"
    )


if __name__ == "__main__":
    main()
