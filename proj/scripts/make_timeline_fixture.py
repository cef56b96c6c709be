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
"""Writes fixtures/timeline96.jsonl: 96 gatherings in 710-712 plus distractors."""
import json
import random
import sys

rng = random.Random(96)
rows = []
for i in range(1, 7):
    rows.append({"table": "person", "row": {"id": f"P{i}", "name": f"Poet {i}", "dynasty": "Tang"}})
years = [710] * 40 + [711] * 31 + [712] * 25 + [709] * 3 + [713] * 4 + [None] * 2
edge = 0
for n, year in enumerate(years, start=1):
    row = {"id": f"Y{n:03d}", "title": f"Gathering {n}"}
    if year is not None:
        row["year"] = year
    rows.append({"table": "gathering", "row": row})
    for person in sorted(rng.sample(range(1, 7), rng.randint(1, 3))):
        edge += 1
        rows.append({"table": "attendance", "row": {"id": f"B{edge:03d}", "person": f"P{person}", "gathering": f"Y{n:03d}"}})
out = open(sys.argv[1], "w", encoding="utf-8") if len(sys.argv) > 1 else sys.stdout
for r in rows:
    out.write(json.dumps(r, ensure_ascii=False) + "\n")
