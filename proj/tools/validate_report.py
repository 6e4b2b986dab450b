#!/usr/bin/env python3
"""Validate a rendered report against schemas/report.schema.json."""

import argparse
import json
import sys

import jsonschema


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("schema")
    parser.add_argument("report")
    args = parser.parse_args()
    with open(args.schema, encoding="utf-8") as f:
        schema = json.load(f)
    with open(args.report, encoding="utf-8") as f:
        report = json.load(f)
    try:
        jsonschema.validate(report, schema, cls=jsonschema.Draft202012Validator)
    except jsonschema.ValidationError as err:
        print(f"schema violation at /{'/'.join(map(str, err.absolute_path))}: {err.message}", file=sys.stderr)
        return 1
    print("report is valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
