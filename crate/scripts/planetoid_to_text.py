#!/usr/bin/env python3
"""Convert a Planetoid raw release (ind.<name>.{x,y,tx,ty,allx,ally,graph,test.index})
into the edges.txt / features.csv / labels.txt layout read by `lerp`.

    python3 scripts/planetoid_to_text.py --raw data/planetoid/raw --name cora --out data/cora

Each undirected edge is written once. Test nodes missing from the CiteSeer
release become isolated rows with zero features and are labeled with class 0;
pass --drop-missing to remove them instead.
"""

import argparse
import pickle
import sys
from pathlib import Path

import numpy as np
import scipy.sparse as sp


def load(raw: Path, name: str, part: str):
    with open(raw / f"ind.{name}.{part}", "rb") as fh:
        return pickle.load(fh, encoding="latin1")


def dense(m):
    return m.toarray() if sp.issparse(m) else np.asarray(m)


def convert(raw: Path, name: str, drop_missing: bool):
    x, y, tx, ty, allx, ally, graph = (load(raw, name, p) for p in ("x", "y", "tx", "ty", "allx", "ally", "graph"))
    test_index = [int(line) for line in (raw / f"ind.{name}.test.index").read_text().split()]
    lo, hi = min(test_index), max(test_index)

    features = np.vstack([dense(allx), dense(tx)])
    onehot = np.vstack([dense(ally), dense(ty)])
    n_train = dense(allx).shape[0]

    # test rows are stored in sorted order; restore their original indices
    full_n = max(n_train + len(test_index), hi + 1)
    feats = np.zeros((full_n, features.shape[1]))
    labels = np.zeros((full_n, onehot.shape[1]))
    present = np.zeros(full_n, dtype=bool)
    feats[:n_train] = features[:n_train]
    labels[:n_train] = onehot[:n_train]
    present[:n_train] = True
    for row, node in enumerate(sorted(test_index)):
        feats[node] = features[n_train + row]
        labels[node] = onehot[n_train + row]
        present[node] = True
    # nodes between the two blocks that some releases omit
    present[n_train:lo] = True

    edges = set()
    for u, nbrs in graph.items():
        for v in nbrs:
            if u != v and u < full_n and v < full_n:
                edges.add((min(u, v), max(u, v)))

    keep = np.arange(full_n)
    if drop_missing:
        keep = np.flatnonzero(present)
    remap = {old: new for new, old in enumerate(keep)}
    edges = sorted((remap[u], remap[v]) for u, v in edges if u in remap and v in remap)
    y_out = labels[keep].argmax(axis=1)
    return feats[keep], y_out, edges, int((~present).sum())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--raw", type=Path, required=True, help="directory holding the ind.<name>.* files")
    ap.add_argument("--name", required=True, help="cora, citeseer or pubmed")
    ap.add_argument("--out", type=Path, required=True)
    ap.add_argument("--drop-missing", action="store_true")
    args = ap.parse_args(argv)

    feats, labels, edges, missing = convert(args.raw, args.name, args.drop_missing)
    args.out.mkdir(parents=True, exist_ok=True)
    with open(args.out / "edges.txt", "w") as fh:
        fh.writelines(f"{u} {v}\n" for u, v in edges)
    np.savetxt(args.out / "features.csv", feats, delimiter=",", fmt="%.10g")
    np.savetxt(args.out / "labels.txt", labels, fmt="%d")
    print(
        f"{args.name}: {feats.shape[0]} nodes, {len(edges)} edges, {labels.max() + 1} classes, "
        f"{feats.shape[1]} features, {missing} missing test nodes",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
