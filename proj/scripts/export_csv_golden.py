#!/usr/bin/env python3
# Copyright 2026 The CohortKit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the cohort CSV for a serialized iteration, independently of the engine.

usage: export_csv_golden.py ITERATION.json CORPUS.jsonl SCHEMA.json > out.csv
"""
import csv
import io
import json
import sys


def fmt(v: float) -> str:
    if v == 0:
        return "0"
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def labels(corpus_path, schema_path):
    schema = json.load(open(schema_path, encoding="utf-8"))
    label_col = {t["table"]: t.get("label") for t in schema["tables"] if "node_type" in t}
    out = {}
    with open(corpus_path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            rec = json.loads(line)
            col = label_col.get(rec["table"])
            if col is None:
                continue
            out[str(rec["row"]["id"])] = str(rec["row"].get(col, ""))
    return out


def main():
    it = json.load(open(sys.argv[1], encoding="utf-8"))
    names = labels(sys.argv[2], sys.argv[3])
    support = {f["id"]: f["support"] for f in it["features"]}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["feature_id", "kind", "weight", "support_count"])
    feats = [(float(f["weight"]), f["id"], f["kind"]) for f in it["concept"]["features"]]
    feats.sort(key=lambda t: (-t[0], t[1]))
    for weight, fid, kind in feats:
        w.writerow([fid, kind, fmt(weight), support[fid]])
    buf.write("\n")
    w.writerow(["figure_id", "name", "score", "status", "origin"])
    rows = [a for a in it["assignment"] if a["status"] == "included"]
    rows.sort(key=lambda a: (-a["score"], a["figure"]))
    for a in rows:
        w.writerow([a["figure"], names[a["figure"]], fmt(a["score"]), a["status"], a["origin"]])
    sys.stdout.write(buf.getvalue())


if __name__ == "__main__":
    main()
