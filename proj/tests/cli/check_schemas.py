"""Runs every polcomp command and validates its JSON against the shipped schemas."""

import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def main() -> int:
    cli, schema_dir, scenario, work = sys.argv[1:5]
    schema_dir, work = pathlib.Path(schema_dir), pathlib.Path(work)
    shutil.rmtree(work, ignore_errors=True)

    schemas = {}
    for p in schema_dir.glob("*.schema.json"):
        s = json.loads(p.read_text())
        jsonschema.Draft202012Validator.check_schema(s)
        schemas[s["$id"]] = s
    registry = Registry().with_resources(
        (k, Resource.from_contents(v)) for k, v in schemas.items())

    commands = [["plan"], ["compare"], ["stability", "--horizon-days", "0.25"],
                ["simulate"]]
    for c in commands:
        r = subprocess.run([cli, *c, "--scenario", scenario, "--out", str(work)],
                           capture_output=True, text=True)
        if r.returncode not in (0, 3):
            print(f"{c[0]} exited {r.returncode}: {r.stderr}")
            return 1

    checks = [("plan.json", "urn:polcomp:plan:1"),
              ("compare.json", "urn:polcomp:compare:1"),
              ("stability.json", "urn:polcomp:stability:1"),
              ("simulate.json", "urn:polcomp:simulate:1")]
    checks += [(str(p.relative_to(work)), "urn:polcomp:ptag-sidecar:1")
               for p in sorted(work.glob("streams/*.ptag.json"))]
    failed = 0
    for name, sid in checks:
        doc = json.loads((work / name).read_text())
        v = jsonschema.Draft202012Validator(schemas[sid], registry=registry)
        errors = list(v.iter_errors(doc))
        for e in errors[:5]:
            print(f"{name}: {e.json_path}: {e.message}")
        failed += bool(errors)
        print(f"{name}: {'ok' if not errors else 'INVALID'}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
