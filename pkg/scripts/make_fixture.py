#!/usr/bin/env python3
"""Regenerate the small committed fixture pair under fixtures/.

The pair is deliberately tiny (about 1,100 words) so the full dynamic
program and every CLI subcommand run in well under a second. Word breaks
are planted on a fixed cadence to exercise restoration. Output is
deterministic; rerunning this script must reproduce the committed files
byte for byte.
"""

import argparse
import os

from scribedist.synth import SynthConfig, format_transcription, make_scribal_pair

MANIFEST = """\
# paired-run configuration for the bundled example
output_dir = "out"
n_samples = 8
mfw_k = 40
ngram_lengths = [3, 4]
ngram_k = 160

[[manuscripts]]
siglum = "A"
path = "ms_A.txt"

[[manuscripts]]
siglum = "B"
path = "ms_B.txt"

[forest]
n_trees = 60
seed = 42

[bootstrap]
n_subsets = 60
subset_size = 80
seed = 7

[[boundaries]]
pair = 4
label = "second habit begins"
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--dest",
        default=os.path.join(os.path.dirname(__file__), "..", "fixtures"),
        help="directory to write ms_A.txt / ms_B.txt / run.toml into",
    )
    args = ap.parse_args()
    dest = os.path.abspath(args.dest)
    os.makedirs(dest, exist_ok=True)

    config = SynthConfig(n_words=1100, seed=20260817)
    exemplar, copy, planted = make_scribal_pair(config)
    text_a = format_transcription(exemplar, break_every=7, seed=11)
    text_b = format_transcription(copy, break_every=9, seed=12)
    for name, text in (("ms_A.txt", text_a), ("ms_B.txt", text_b)):
        with open(os.path.join(dest, name), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    with open(os.path.join(dest, "run.toml"), "w", encoding="utf-8", newline="") as fh:
        fh.write(MANIFEST)
    print(f"wrote ms_A.txt ({len(exemplar)} tokens), ms_B.txt ({len(copy)} tokens)")
    print(f"takeover at exemplar position {planted.takeover_index}")
    print(f"altered forms: {len(planted.b_side_forms)}")


if __name__ == "__main__":
    main()
