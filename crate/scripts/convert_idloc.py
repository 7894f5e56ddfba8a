#!/usr/bin/env python3
"""Convert id.loc.gov bulk MADS/RDF JSON-LD exports to subjex canonical NDJSON.

The bulk files at id.loc.gov ship one JSON-LD document per line, each with an
``@graph`` array describing one authority record. This script flattens each
line to the canonical shape the subjex authority store loads:

    {"id", "scheme", "kind", "authorized", "variants",
     "broader", "narrower", "geo_subdividable"}

Usage:
    python3 scripts/convert_idloc.py --scheme lcsh  subjects.madsrdf.jsonld  > lcsh.ndjson
    python3 scripts/convert_idloc.py --scheme lcgft genreForms.madsrdf.jsonld > lcgft.ndjson

The geographic-subdividability flag is not carried in the MADS/RDF bulk
export (it lives in the MARC authority 008/06 byte), so it defaults to
false. Supply ``--geo-subdividable-list FILE`` (one record id per line) to
set it for known ids.

Best effort: lines whose shape is not recognized are counted and skipped,
and a summary goes to stderr.
"""

import argparse
import json
import sys

MADS = "http://www.loc.gov/mads/rdf/v1#"

KIND_BY_TYPE = {
    "madsrdf:Topic": "topical",
    "madsrdf:ComplexSubject": "topical",
    "madsrdf:Geographic": "geographic",
    "madsrdf:GenreForm": "genre_form",
    MADS + "Topic": "topical",
    MADS + "ComplexSubject": "topical",
    MADS + "Geographic": "geographic",
    MADS + "GenreForm": "genre_form",
}


def as_list(value):
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def literal(value):
    """A label literal may be a string, an {@value} object, or a list."""
    for item in as_list(value):
        if isinstance(item, str):
            return item
        if isinstance(item, dict) and "@value" in item:
            return item["@value"]
    return None


def node_ids(value):
    out = []
    for item in as_list(value):
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, dict) and "@id" in item:
            out.append(item["@id"])
    return out


def tail(uri):
    return uri.rstrip("/").rsplit("/", 1)[-1]


def find_main_node(graph, record_uri):
    for node in graph:
        if node.get("@id") == record_uri:
            return node
    # fall back: first node with an authoritative label and a known type
    for node in graph:
        types = as_list(node.get("@type"))
        if any(t in KIND_BY_TYPE for t in types) and (
            node.get("madsrdf:authoritativeLabel") or node.get(MADS + "authoritativeLabel")
        ):
            return node
    return None


def get(node, key):
    return node.get("madsrdf:" + key) or node.get(MADS + key)


def convert_line(line, scheme, geo_ids):
    doc = json.loads(line)
    graph = doc.get("@graph")
    if graph is None:
        graph = [doc]
    record_uri = doc.get("@id")
    main = find_main_node(graph, record_uri)
    if main is None:
        raise ValueError("no authority node found")

    authorized = literal(get(main, "authoritativeLabel"))
    if not authorized:
        raise ValueError("no authoritative label")

    kind = None
    for t in as_list(main.get("@type")):
        if t in KIND_BY_TYPE:
            kind = KIND_BY_TYPE[t]
            break
    if kind is None:
        kind = "genre_form" if scheme == "lcgft" else "topical"

    labels_by_id = {}
    for node in graph:
        label = literal(get(node, "variantLabel"))
        if label and node.get("@id"):
            labels_by_id[node["@id"]] = label

    variants = []
    for ref in node_ids(get(main, "hasVariant")):
        if ref in labels_by_id:
            variants.append(labels_by_id[ref])
    # some dumps inline the variant label directly
    inline = literal(get(main, "variantLabel"))
    if inline and inline not in variants:
        variants.append(inline)

    record_id = tail(main.get("@id") or record_uri or authorized)
    out = {
        "id": record_id,
        "scheme": scheme,
        "kind": kind,
        "authorized": authorized,
    }
    if variants:
        out["variants"] = variants
    broader = [tail(u) for u in node_ids(get(main, "hasBroaderAuthority"))]
    if broader:
        out["broader"] = broader
    narrower = [tail(u) for u in node_ids(get(main, "hasNarrowerAuthority"))]
    if narrower:
        out["narrower"] = narrower
    if record_id in geo_ids:
        out["geo_subdividable"] = True
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", help="MADS/RDF JSON-LD NDJSON file (- for stdin)")
    parser.add_argument("--scheme", choices=["lcsh", "lcgft"], required=True)
    parser.add_argument(
        "--geo-subdividable-list",
        help="file of record ids (one per line) authorized for geographic subdivision",
    )
    args = parser.parse_args()

    geo_ids = set()
    if args.geo_subdividable_list:
        with open(args.geo_subdividable_list, encoding="utf-8") as f:
            geo_ids = {line.strip() for line in f if line.strip()}

    source = sys.stdin if args.input == "-" else open(args.input, encoding="utf-8")
    converted = skipped = 0
    with source:
        for lineno, line in enumerate(source, 1):
            if not line.strip():
                continue
            try:
                record = convert_line(line, args.scheme, geo_ids)
            except (ValueError, json.JSONDecodeError) as exc:
                skipped += 1
                print(f"line {lineno}: skipped ({exc})", file=sys.stderr)
                continue
            print(json.dumps(record, ensure_ascii=False))
            converted += 1
    print(f"converted {converted} records, skipped {skipped}", file=sys.stderr)


if __name__ == "__main__":
    main()
