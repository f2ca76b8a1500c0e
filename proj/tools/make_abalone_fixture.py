#!/usr/bin/env python3
#
# Copyright 2026 The urtree Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Build data/abalone.csv from the public 4177-row abalone.data table.

Usage: make_abalone_fixture.py abalone.data [--out data/abalone.csv]

The row subset is data/abalone_subsample_indices.txt (500 zero-based row
numbers drawn once with random.Random(20260101).sample(range(4177), 500)).
The categorical Sex column is dropped, leaving 7 features and the target
column `rings`.
"""

import argparse
import csv
import pathlib

COLUMNS = ["length", "diameter", "height", "whole_weight", "shucked_weight",
           "viscera_weight", "shell_weight", "rings"]


def main():
    here = pathlib.Path(__file__).resolve().parent.parent / "data"
    ap = argparse.ArgumentParser()
    ap.add_argument("source")
    ap.add_argument("--indices", default=str(here / "abalone_subsample_indices.txt"))
    ap.add_argument("--out", default=str(here / "abalone.csv"))
    args = ap.parse_args()

    with open(args.source, newline="") as f:
        rows = [r for r in csv.reader(f) if r]
    if len(rows) != 4177:
        raise SystemExit(f"expected 4177 rows, got {len(rows)}")
    indices = [int(line) for line in pathlib.Path(args.indices).read_text().split()]

    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(COLUMNS)
        for i in indices:
            w.writerow(rows[i][1:])
    print(f"wrote {len(indices)} rows to {args.out}")


if __name__ == "__main__":
    main()
