#!/usr/bin/env python3
# Copyright 2026 The bayerpipe Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the natural test set used by the test suite.

Center 256x256 crops of public-domain / CC0 images shipped with
scikit-image, stored as binary PPM.
"""

import argparse
import pathlib

import numpy as np
from skimage import data

SOURCES = ("astronaut", "chelsea", "coffee", "hubble_deep_field", "rocket")
SIZE = 256


def center_crop(img, size):
    h, w = img.shape[:2]
    top = (h - size) // 2
    left = (w - size) // 2
    return img[top:top + size, left:left + size, :3]


def write_ppm(path, img):
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape[:2]
    with open(path, "wb") as f:
        f.write(b"P6\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(
        pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "natural"))
    args = parser.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in SOURCES:
        img = center_crop(getattr(data, name)(), SIZE)
        write_ppm(out / f"{name}.ppm", img)
        print(out / f"{name}.ppm")


if __name__ == "__main__":
    main()
