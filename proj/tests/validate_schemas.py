#!/usr/bin/env python3
"""Run the CLI and validate its JSON output against tools/schemas."""
import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource

cli = sys.argv[1]
schema_dir = pathlib.Path(sys.argv[2])

schemas = {}
for path in schema_dir.glob("*.schema.json"):
    schemas[path.name] = json.loads(path.read_text())
registry = Registry().with_resources(
    (name, Resource.from_contents(s)) for name, s in schemas.items()
)


def validator(name):
    cls = jsonschema.validators.validator_for(schemas[name])
    cls.check_schema(schemas[name])
    return cls(schemas[name], registry=registry)


def run(args, expect_code=0):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode != expect_code:
        raise SystemExit(f"{args}: exit {proc.returncode}, expected {expect_code}\n{proc.stderr}")
    return proc.stdout


def lines(text):
    return [json.loads(s) for s in text.splitlines() if s.strip()]


failures = 0


def check(name, docs, label):
    global failures
    v = validator(name)
    for doc in docs:
        errors = sorted(v.iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            failures += 1
            print(f"FAIL {label}: {list(e.path)}: {e.message}")
    print(f"ok   {label}: {len(docs)} document(s) against {name}")


check("gen_complex.schema.json", [json.loads(run(["gen-complex", "--q", "2", "--radius", "3"]))],
      "gen-complex q=2 L=3")
check("gen_complex.schema.json", [json.loads(run(["gen-complex", "--q", "3", "--radius", "2"]))],
      "gen-complex q=3 L=2")

check("count_stabilizers.schema.json",
      lines(run(["count-stabilizers", "--q", "2", "--vertex", "0,0,0", "--vertex", "2,1,0"])),
      "count-stabilizers brute force")
check("count_stabilizers.schema.json",
      lines(run(["count-stabilizers", "--q", "3", "--vertex", "3,2,1", "--no-brute"])),
      "count-stabilizers formula only")

check("classify.schema.json", [json.loads(run(["classify", "--q", "2", "--lambda", "15", "35", "15"]))],
      "classify trivial")
check("classify.schema.json",
      [json.loads(run(["classify", "--q", "2", "--z", "q e^{i0.4}", "e^{i0.4}", "e^{-i1.2}", "q^-1 e^{i0.4}"]))],
      "classify family 2")
check("classify.schema.json",
      [json.loads(run(["classify", "--q", "2", "--z", "2", "0.5", "e^{i1.0471975511965976}",
                       "e^{-i1.0471975511965976}"]))],
      "classify non-member")
check("classify.schema.json",
      [json.loads(run(["classify", "--q", "3", "--family", "Tempered", "--params", "0.3", "1.1", "-2.0"]))],
      "classify tempered")

for fam in ["Trivial", "Family2", "Family3", "Family4", "Tempered"]:
    check("report.schema.json", lines(run(["weyl-test", "--q", "2", "--family", fam, "--eps", "0.1"])),
          f"weyl-test {fam}")
check("report.schema.json", lines(run(["appendix-b", "--q", "2", "--family", "Tempered", "--N", "50"])),
      "appendix-b tempered")
check("report.schema.json", lines(run(["report", "--q", "2", "--grid", "8"])), "report q=2")

sys.exit(1 if failures else 0)
