#!/usr/bin/env python3
"""Runs the CLI on each command and on the sample configs, validates every
report against its JSON schema and checks the documented exit codes.

usage: check_schemas.py <siftshadow> <schema dir> <samples dir> <work dir>
"""

import json
import os
import subprocess
import sys

import jsonschema

cli, schema_dir, samples_dir, work = sys.argv[1:5]
os.makedirs(work, exist_ok=True)
failures = []


def run(args, expect_rc=0):
    proc = subprocess.run([cli] + args, capture_output=True, text=True)
    if proc.returncode != expect_rc:
        failures.append(f"{' '.join(args)}: exit {proc.returncode}, expected {expect_rc}: {proc.stderr.strip()}")
    return proc


def schema_for(command):
    with open(os.path.join(schema_dir, f"{command}.schema.json")) as f:
        return json.load(f)


def validate(path, label):
    try:
        with open(path) as f:
            report = json.load(f)
        jsonschema.validate(report, schema_for(report["command"]))
    except (OSError, ValueError, KeyError, jsonschema.ValidationError) as e:
        failures.append(f"{label}: {str(e).splitlines()[0]}")
        return None
    return report


commands = [
    ["sift", "--values", "1,-1,1,1", "--H", "1"],
    ["sift", "--map", "doubling", "--horizon", "500"],
    ["shadow", "--map", "perturbed_doubling(0.1)", "--horizon", "200", "--seed", "1"],
    ["shadow", "--map", "doubling", "--points", "0.1,0.2,0.4"],
    ["close", "--map", "doubling", "--points", "0.14290,0.28575,0.57140", "--restarts", "2"],
    ["close", "--map", "doubling", "--points", "0.032258,0.064516,0.129032,0.258065,0.516129", "--lengths", "2,3"],
    ["repellers", "--map", "doubling", "--horizon", "5000", "--seed", "3"],
    ["verify-abnormal", "--map", "doubling", "--point", "0", "--period", "1", "--gamma-prime", "0.5"],
    ["verify-abnormal", "--map", "pl_tent(3,1.5)", "--itinerary", "0,1", "--gamma-prime", "0.3"],
    ["expansion-fit", "--map", "doubling", "--k-max", "5", "--sample-size", "8"],
    ["expansion-fit", "--map", "neutral_fixed(0.5)", "--points", "0,0.3"],
    ["expansion-fit", "--map", "bm_cocycle(2,2)", "--k-max", "6", "--sample-size", "4"],
    ["kingman", "--map", "doubling", "--levels", "3", "--blocks", "16"],
    ["kingman", "--map", "bm_cocycle(2,2)", "--levels", "3", "--blocks", "16", "--seed", "9"],
]
for i, args in enumerate(commands):
    out = os.path.join(work, f"cmd{i}.json")
    if run(args + ["-o", out]).returncode == 0:
        validate(out, " ".join(args))

for name in sorted(os.listdir(samples_dir)):
    if not name.endswith(".conf"):
        continue
    out = os.path.join(work, name + ".json")
    if run(["--config", os.path.join(samples_dir, name), "-o", out]).returncode == 0:
        validate(out, name)

# command line flags override the config file
conf = os.path.join(samples_dir, "close_seven_cycle.conf")
out = os.path.join(work, "override.json")
if run(["close", "--config", conf, "--epsilon", "0.02", "-o", out]).returncode == 0:
    report = validate(out, "override")
    if report and report["config"]["epsilon"] != 0.02:
        failures.append("command line flag did not override the config file")

# CSV output of the repeller search
out = os.path.join(work, "reps.csv")
if run(["repellers", "--horizon", "5000", "--seed", "3", "--format", "csv", "-o", out]).returncode == 0:
    with open(out) as f:
        header = f.readline().strip()
    if header != "period,point,indicator,shadow_distance,hausdorff":
        failures.append(f"unexpected CSV header {header!r}")

# validation errors exit 2
bad_conf = os.path.join(work, "bad.conf")
with open(bad_conf, "w") as f:
    f.write("command = close\nnot-a-key = 1\n")
run(["--config", bad_conf], 2)
with open(bad_conf, "w") as f:
    f.write("command = close\nthis line has no equals sign\n")
run(["--config", bad_conf], 2)
run(["sift", "--values", "2,0", "--H", "1"], 2)
run(["close", "--map", "tent", "--points", "0.1"], 2)
run(["close", "--points", "0.1,0.7,0.3"], 2)
run(["repellers", "--gammas", "0.4,0.5,0.6"], 2)
run(["repellers", "--format", "xml"], 2)
run(["kingman", "--bogus"], 2)

# solver errors exit 3
run(["repellers", "--map", "doubling", "--horizon", "12"], 3)
run(["repellers", "--map", "pl_tent(3,1.5)", "--gammas", "0.9,0.85,0.8", "--horizon", "2000"], 3)

# compare: identical reports exit 0, differing reports exit 1
a = os.path.join(work, "cmp_a.json")
b = os.path.join(work, "cmp_b.json")
run(["close", "--points", "0.14290,0.28575,0.57140", "-o", a])
run(["close", "--points", "0.14290,0.28575,0.57140", "-o", b])
run(["compare", a, b], 0)
run(["close", "--points", "0.14290,0.28575,0.57140", "--epsilon", "0.02", "-o", b])
run(["compare", a, b], 1)
run(["verify-abnormal", "--point", "0", "-o", b])
run(["compare", a, b], 2)

for f in failures:
    print("FAIL", f)
print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
