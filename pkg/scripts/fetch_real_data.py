"""Provenance notes and a converter for the real link-prediction networks.

The library reads networks from a two-column whitespace-separated edge
list (0-based node ids, one undirected edge per line; see
graphonfl.matio.load_edge_tsv). The protein-interaction networks used in
the link-prediction literature are not bundled here because their
licenses sit with the original distributors. This script records where
they come from and relabels a raw edge list into the expected format.

Known datasets:

  protein230
      Escherichia coli protein interaction network, 230 proteins, from
      Butland et al., "Interaction network containing conserved and
      essential protein complexes in Escherichia coli", Nature 433 (2005).
      Circulates as a plain edge list in link-prediction benchmark
      collections.

  yeast
      Saccharomyces cerevisiae protein interaction network (~2361
      proteins), from Bu et al., "Topological structure analysis of the
      protein-protein interaction network in budding yeast", Nucleic
      Acids Research 31 (2003). A Pajek copy is distributed at
      http://vlado.fmf.uni-lj.si/pub/networks/data/ under bio/Yeast.

Neither file downloads automatically. Obtain the raw edge list from the
source, then convert it:

    python3 scripts/fetch_real_data.py raw_edges.txt data/yeast.tsv

The converter accepts arbitrary node labels (strings or sparse ints),
drops self-loops and duplicate edges, relabels nodes to 0..n-1 in first-
seen order, and writes the result with a node-count header comment.
"""

from __future__ import annotations

import argparse
import sys


def convert(src: str, dst: str) -> tuple[int, int]:
    """Relabel an edge list at src into 0-based TSV at dst.

    Returns (n_nodes, n_edges) after cleaning.
    """
    ids: dict[str, int] = {}
    edges: set[tuple[int, int]] = set()
    with open(src, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            if len(parts) < 2:
                raise ValueError(f"{src}:{lineno}: expected two labels")
            a = ids.setdefault(parts[0], len(ids))
            b = ids.setdefault(parts[1], len(ids))
            if a == b:
                continue
            edges.add((min(a, b), max(a, b)))
    if not edges:
        raise ValueError(f"{src}: no edges after cleaning")
    with open(dst, "w", encoding="utf-8") as fh:
        fh.write(f"# {len(ids)} nodes, {len(edges)} edges\n")
        for i, j in sorted(edges):
            fh.write(f"{i}\t{j}\n")
    return len(ids), len(edges)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("src", help="raw edge list (any labels)")
    ap.add_argument("dst", help="output TSV path (0-based ids)")
    args = ap.parse_args()
    try:
        n, m = convert(args.src, args.dst)
    except (OSError, ValueError) as exc:
        sys.exit(f"error: {exc}")
    print(f"wrote {args.dst}: {n} nodes, {m} edges")


if __name__ == "__main__":
    main()
