"""Regenerate fixtures/taxonomy/carnivora_graph.json from carnivora.tsv.

Independent restatement of the graph rules:
  * names are lowercased, hyphens between letters become spaces,
    whitespace is collapsed;
  * a shared suffix is a whole-word trailing run found in at least two
    distinct common names and strictly shorter than at least one;
  * edges: species--common name; common name--its longest word suffix that
    is a shared suffix (the whole name included); shared suffix--its longest
    strictly shorter shared suffix.
"""
import json
import pathlib
import re

ROOT = pathlib.Path(__file__).resolve().parent.parent
TAX = ROOT / "fixtures" / "taxonomy"


def norm(s):
    s = s.replace("’", "'").strip().lower()
    s = re.sub(r"(?<=[^\W\d_])-(?=[^\W\d_])", " ", s)
    return " ".join(s.split())


def suffixes(name):
    w = name.split()
    return [" ".join(w[i:]) for i in range(len(w))]


def main():
    species = {}
    for line in (TAX / "carnivora.tsv").read_text(encoding="utf-8").splitlines()[1:]:
        sci, names = line.split("\t")[:2]
        species[norm(sci)] = sorted({norm(n) for n in names.split("|") if n.strip()})
    common = sorted({n for ns in species.values() for n in ns})

    shared = set()
    for cand in {s for n in common for s in suffixes(n)}:
        holders = [n for n in common if cand in suffixes(n)]
        if len(holders) >= 2 and any(len(h.split()) > len(cand.split()) for h in holders):
            shared.add(cand)

    nodes = {f"sci:{s}" for s in species} | {f"common:{n}" for n in common} | {f"sub:{s}" for s in shared}
    edges = set()
    for sci, names in species.items():
        for n in names:
            edges.add((f"sci:{sci}", f"common:{n}", "species_common"))
    for n in common:
        hit = next((s for s in suffixes(n) if s in shared), None)
        if hit:
            edges.add((f"common:{n}", f"sub:{hit}", "name_substring"))
    for s in shared:
        hit = next((t for t in suffixes(s)[1:] if t in shared), None)
        if hit:
            edges.add((f"sub:{s}", f"sub:{hit}", "name_substring"))

    out = {
        "nodes": sorted(nodes),
        "edges": sorted([min(a, b), max(a, b), k] for a, b, k in edges),
    }
    (TAX / "carnivora_graph.json").write_text(json.dumps(out, indent=1, ensure_ascii=False) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
