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
"""Validates saved API responses against docs/api/responses.schema.json.

Usage: validate_api_samples.py SCHEMA SAMPLE_DIR
Each sample NAME.json is checked against $defs/NAME; job_done maps to $defs/job.
"""
import json
import pathlib
import sys

import jsonschema

ALIASES = {"job_done": "job"}


def main():
    schema_path, sample_dir = sys.argv[1], pathlib.Path(sys.argv[2])
    root = json.loads(pathlib.Path(schema_path).read_text(encoding="utf-8"))
    jsonschema.Draft202012Validator.check_schema(root)
    samples = sorted(sample_dir.glob("*.json"))
    if not samples:
        print(f"no samples in {sample_dir}")
        return 1
    failures = 0
    for path in samples:
        name = ALIASES.get(path.stem, path.stem)
        if name not in root["$defs"]:
            print(f"FAIL {path.name}: no schema definition '{name}'")
            failures += 1
            continue
        schema = dict(root, **{"$ref": f"#/$defs/{name}"})
        validator = jsonschema.Draft202012Validator(schema)
        errors = sorted(validator.iter_errors(json.loads(path.read_text(encoding="utf-8"))), key=str)
        for e in errors:
            print(f"FAIL {path.name}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {path.name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
