#!/usr/bin/env python3
"""Produce the standard JSON artifacts into an output directory.

Runs the CLI in-process so the files are byte-identical to what the
installed `pjet` command prints; handy both as a demo and for regenerating
golden files.
"""

import os
import sys

from pjet.cli import main

JOBS = [
    ("psi_fourier_p5.json", ["psi", "--p", "5", "--side", "fourier", "--M", "8", "--window", "30"]),
    ("psi_serretate_p5.json", ["psi", "--p", "5", "--side", "serretate", "--N", "30"]),
    ("fe0_P5_7_N50.json", ["fe0", "--P", "5,7", "--N", "50"]),
    ("fe_k1_P5_7_N50.json", ["fe-k", "--P", "5,7", "--k", "1", "--N", "50"]),
    ("f2e0_P5_13_N40.json", ["f2e0", "--P", "5,13", "--N", "40"]),
    ("fsharp_p13_w30.json", ["fsharp", "--p", "13", "--window", "30", "--M", "6"]),
    ("eisenstein_E4.json", ["eisenstein", "--k", "4", "--trunc", "20"]),
    ("basis_rank_P5_7.json", ["check-basis", "--P", "5,7", "--r", "2,2", "--N", "50"]),
    ("commutator_6_2_3.json", ["check-commutator", "--p1", "2", "--p2", "3", "--value", "6"]),
    ("lemma_xlaphi_p5_n2.json", ["check-lemma", "--name", "xlaphi", "--p", "5", "--n", "2", "--varphi", "symbolic"]),
]


def run(outdir: str) -> int:
    os.makedirs(outdir, exist_ok=True)
    worst = 0
    for fname, argv in JOBS:
        path = os.path.join(outdir, fname)
        code = main(["--out", path, *argv])
        print(f"[{code}] {fname}")
        worst = max(worst, code)
    # covariance of the order-e form, consuming one of the artifacts above
    fe0 = os.path.join(outdir, "fe0_P5_7_N50.json")
    code = main(["check-covariance", "--input", fe0, "--gamma", "2", "--nu", "1"])
    print(f"[{code}] covariance of the order-e form")
    return max(worst, code)


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "out"))
