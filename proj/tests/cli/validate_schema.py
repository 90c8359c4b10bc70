"""Validate CLI JSON reports against schemas/report.schema.json."""

import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, schema_path, work = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    runs = {
        "sibony": ["sibony", "--eps-min", "1e-4", "--eps-count", "3"],
        "demo": ["demo"],
        "minus": ["asymptotics", "--experiment", "minus-model", "--eps-min", "1e-4", "--eps-count", "3"],
    }
    failures = 0
    for name, args in runs.items():
        out = work / f"schema_{name}.json"
        proc = subprocess.run([cli, *args, "--format", "json", "--out", str(out)], capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{name}: exit {proc.returncode}\n{proc.stderr}")
            failures += 1
            continue
        report = json.loads(out.read_text())
        errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.path))}: {e.message}")
        failures += bool(errors)
        if not report["rows"]:
            print(f"{name}: no rows")
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
