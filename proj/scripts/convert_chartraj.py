#!/usr/bin/env python3
"""Convert the UCI Character Trajectories archive to dynafit CSV form.

Reads mixoutALL_shifted.mat (the MATLAB file shipped with the UCI archive),
zero-pads every 3 x T pen trajectory to the longest length and writes one CSV
per sample plus manifest.json:

    python3 scripts/convert_chartraj.py mixoutALL_shifted.mat out/chartraj
"""

import argparse
import json
import pathlib
import sys

import numpy as np
import scipy.io


def load(path):
    mat = scipy.io.loadmat(path, squeeze_me=True, struct_as_record=False)
    consts = mat["consts"]
    trajectories = [np.atleast_2d(np.asarray(t, dtype=float)) for t in mat["mixout"]]
    labels = np.atleast_1d(consts.charlabels).astype(int)
    keys = [str(k) for k in np.atleast_1d(consts.key)]
    if len(trajectories) != len(labels):
        sys.exit(f"{path}: {len(trajectories)} trajectories but {len(labels)} labels")
    return trajectories, [keys[i - 1] for i in labels]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("mat", type=pathlib.Path)
    parser.add_argument("out", type=pathlib.Path)
    args = parser.parse_args()

    trajectories, labels = load(args.mat)
    n = trajectories[0].shape[0]
    length = max(t.shape[1] for t in trajectories)
    args.out.mkdir(parents=True, exist_ok=True)

    files = []
    for i, (t, label) in enumerate(zip(trajectories, labels)):
        padded = np.zeros((n, length))
        padded[:, : t.shape[1]] = t
        name = f"{label}_{i:05d}.csv"
        np.savetxt(args.out / name, padded.T, delimiter=",", fmt="%.17g")
        files.append({"path": name, "label": label})

    manifest = {
        "files": files,
        "n": n,
        "N": length,
        "meta": {"source": args.mat.name, "padding": "zeros to the longest trajectory"},
    }
    (args.out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(files)} trajectories ({n} x {length}) to {args.out}")


if __name__ == "__main__":
    main()
