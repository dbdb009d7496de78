#!/usr/bin/env python3
"""Write a self-contained input set for playing with the CLI.

Creates, in the target directory:
  A.mtx           6x6 front-equitable integer matrix
  part.json       the partition it is equitable against
  weights.json    unit weights
  A_rect.mtx      7x5 complex matrix
  Wm.mtx, Wp.mtx  block diagonal side matrices for the rect command
  structure.json  their block grid
"""
import argparse
import json
from pathlib import Path

import numpy as np

from equitile.mmio import save_matrix_market
from equitile.rectangular import assemble_block_diagonal


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir", nargs="?", default="demo")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    A = np.array(
        [
            [1, 2, 3, 3, 3, 2],
            [2, 4, 3, 1, 2, 1],
            [3, 3, 1, 4, 1, 1],
            [3, 1, 4, 0, 2, 3],
            [3, 2, 1, 2, 3, 2],
            [2, 1, 1, 3, 2, 4],
        ]
    )
    save_matrix_market(out / "A.mtx", A)
    (out / "part.json").write_text(
        json.dumps({"n": 6, "cells": [[1], [2, 6], [3, 4, 5]]}) + "\n"
    )
    (out / "weights.json").write_text(json.dumps([1, 1, 1, 1, 1, 1]) + "\n")

    m_sizes, q_sizes = [3, 4], [1, 2]
    n_sizes, r_sizes = [2, 3], [1, 2]
    wm = [rng.normal(size=(m, q)) + 1j * rng.normal(size=(m, q))
          for m, q in zip(m_sizes, q_sizes)]
    wp = [rng.normal(size=(n, r)) + 1j * rng.normal(size=(n, r))
          for n, r in zip(n_sizes, r_sizes)]
    A_rect = rng.normal(size=(7, 5)) + 1j * rng.normal(size=(7, 5))
    save_matrix_market(out / "A_rect.mtx", A_rect)
    save_matrix_market(out / "Wm.mtx", assemble_block_diagonal(wm))
    save_matrix_market(out / "Wp.mtx", assemble_block_diagonal(wp))
    (out / "structure.json").write_text(json.dumps({
        "left": {"m_sizes": m_sizes, "q_sizes": q_sizes},
        "right": {"n_sizes": n_sizes, "r_sizes": r_sizes},
    }, indent=2) + "\n")

    print(f"wrote demo inputs to {out}/")
    print("try:")
    print(f"  equitile refine {out}/A.mtx")
    print(f"  equitile check {out}/A.mtx {out}/part.json --epsilon --regular")
    print(f"  equitile transform {out}/A.mtx {out}/part.json --emit full,E,F --out-dir {out}/blocks")
    print(f"  equitile split {out}/A.mtx {out}/part.json")
    print(f"  equitile rect {out}/A_rect.mtx {out}/structure.json {out}/Wm.mtx {out}/Wp.mtx --out-dir {out}/rect")


if __name__ == "__main__":
    main()
