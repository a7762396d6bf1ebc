#!/usr/bin/env python3
"""Exit codes, determinism and the documented examples of the CLI."""
import csv
import io
import json
import math
import subprocess
import sys

cli = sys.argv[1]
failures = 0


def run(*args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


def expect(label, cond, detail=""):
    global failures
    if not cond:
        failures += 1
    print(f"{'ok  ' if cond else 'FAIL'} {label}{'' if cond else ': ' + detail}")


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


NON_MEMBER = ["2", "0.5", "e^{i1.0471975511965976}", "e^{-i1.0471975511965976}"]

# usage errors
for label, args in [
    ("q=1 rejected", ["gen-complex", "--q", "1", "--radius", "2"]),
    ("eps outside (0,1/2) rejected", ["weyl-test", "--q", "2", "--family", "Tempered", "--eps", "0.7"]),
    ("malformed complex rejected", ["classify", "--q", "2", "--z", "1+", "1", "1", "1"]),
    ("unknown family rejected", ["residual-sweep", "--q", "2", "--family", "Family9", "--count", "1"]),
    ("unknown subcommand rejected", ["frobnicate"]),
    ("missing input rejected", ["classify", "--q", "2"]),
]:
    p = run(*args)
    expect(label, p.returncode == 2, f"exit {p.returncode}")

# gen-complex
p = run("gen-complex", "--q", "2", "--radius", "1")
doc = json.loads(p.stdout)
expect("gen-complex L=1 has 4 vertices", p.returncode == 0 and len(doc["vertices"]) == 4)
origin = doc["vertices"][0]
expect("origin adjacency is the first table row",
       origin["adjacency"] == {"1": [{"to": [1, 0, 0], "coeff": 15}],
                               "2": [{"to": [1, 1, 0], "coeff": 35}],
                               "3": [{"to": [1, 1, 1], "coeff": 15}]}, str(origin["adjacency"]))
p = run("gen-complex", "--q", "2", "--radius", "3")
expect("gen-complex L=3 has 20 vertices", len(json.loads(p.stdout)["vertices"]) == 20)

# classify
d = json.loads(run("classify", "--q", "2", "--lambda", "15", "35", "15").stdout)
expect("lambda (15,35,15) is Trivial k=0", d["family"] == "Trivial" and d["k"] == 0, str(d.get("family")))
p = run("classify", "--q", "2", "--z", "q e^{i0.4}", "e^{i0.4}", "e^{-i1.2}", "q^-1 e^{i0.4}")
d = json.loads(p.stdout)
expect("family-2 tuple is Family2", d["family"] == "Family2" and abs(d["theta"] - 0.4) < 1e-9, str(d.get("family")))
d = json.loads(run("classify", "--q", "3", "--family", "Tempered", "--params", "0.3", "1.1", "-2.0").stdout)
expect("tempered sample lies in the building spectrum",
       d["family"] == "Tempered" and d["in_building_spectrum"] is True)
p = run("classify", "--q", "2", "--z", *NON_MEMBER)
d = json.loads(p.stdout)
expect("non-member rejected with a witness",
       p.returncode == 0 and d["family"] == "NotInSpectrum" and d["report"]["evidence"]["witness"],
       p.stdout[:200])

# residual sweeps
p = run("residual-sweep", "--q", "2", "--radius", "25", "--family", "Family4", "--count", "20", "--format", "csv")
r = rows(p.stdout)
worst = max(float(x[k]) for x in r for k in ("max_residual_i1", "max_residual_i2", "max_residual_i3"))
expect("Family4 sweep: 20 rows, all below 1e-9", p.returncode == 0 and len(r) == 20 and worst <= 1e-9,
       f"{len(r)} rows, worst {worst}")
p = run("residual-sweep", "--q", "2", "--family", "Trivial", "--count", "1", "--format", "csv")
r = rows(p.stdout)
expect("Trivial sweep residual vanishes",
       all(float(r[0][k]) < 1e-12 for k in ("max_residual_i1", "max_residual_i2", "max_residual_i3")))
p = run("residual-sweep", "--q", "2", "--z", *NON_MEMBER, "--count", "1", "--format", "csv")
r = rows(p.stdout)
expect("non-member residual small and flagged",
       r[0]["flag"] == "not in spectrum" and float(r[0]["max_residual_i1"]) <= 1e-9, p.stdout)

# determinism
a = run("residual-sweep", "--q", "3", "--family", "Tempered", "--count", "5", "--seed", "17", "--format", "csv").stdout
b = run("residual-sweep", "--q", "3", "--family", "Tempered", "--count", "5", "--seed", "17", "--format", "csv").stdout
expect("sweeps reproducible for a fixed seed", a == b and a.count("\n") == 6)

# spectrum figure
p = run("spectrum-figure", "--q", "2", "--grid", "16", "--format", "csv")
r = rows(p.stdout)
triv = sorted((round(float(x["re_lambda1"]), 9), round(float(x["im_lambda1"]), 9)) for x in r if x["family"] == "Trivial")
expect("trivial points are 15 i^k", triv == sorted([(15.0, 0.0), (-15.0, 0.0), (0.0, 15.0), (0.0, -15.0)]), str(triv))
bound = 4 * 2 ** 1.5 + 1e-9
temp = [math.hypot(float(x["re_lambda1"]), float(x["im_lambda1"])) for x in r if x["family"] == "Tempered"]
expect("tempered cloud inside |lambda1| <= 4 q^{3/2}", temp and max(temp) <= bound)

# count-stabilizers
d = [json.loads(s) for s in run("count-stabilizers", "--q", "2", "--vertex", "0,0,0", "--vertex", "1,1,0").stdout.split("\n") if s]
expect("count-stabilizers matches", [x["formula_order"] for x in d] == ["20160", "9216"] and all(x["match"] for x in d))

sys.exit(1 if failures else 0)
