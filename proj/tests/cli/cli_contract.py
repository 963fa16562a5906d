#!/usr/bin/env python3
"""Contract tests for the experiment runner CLI.

Covers exit codes, the error JSON shape, output formats, config-file
semantics, the seed environment variable, and byte-for-byte reproducibility.
"""
import json
import os
import pathlib
import subprocess
import sys

RUNNER = sys.argv[1]
WORK = pathlib.Path(sys.argv[2])
WORK.mkdir(parents=True, exist_ok=True)

failures = []


def run(args, env_extra=None, expect=0):
    env = dict(os.environ)
    env.pop("SGM_SEED", None)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run([RUNNER] + args, capture_output=True, text=True, env=env)
    if proc.returncode != expect:
        failures.append(f"{args}: exit {proc.returncode}, expected {expect}\n"
                        f"stderr: {proc.stderr[:400]}")
    return proc


def check(cond, what):
    if not cond:
        failures.append(what)


# --- csv pmf: 101 rows summing to 1, config embedded -------------------------
proc = run(["cw", "pmf", "--n", "100", "--beta", "2", "--b", "0",
            "--format", "csv"])
lines = proc.stdout.strip().splitlines()
data = [l for l in lines if l and not l.startswith("#") and not l.startswith("m,")]
check(len(data) == 101, f"cw pmf csv: {len(data)} data rows, expected 101")
total = sum(float(l.split(",")[1]) for l in data)
check(abs(total - 1.0) < 1e-9, f"cw pmf csv: probabilities sum to {total}")
check(any(l.startswith("# config,") for l in lines), "cw pmf csv: config line missing")
check(any(l.startswith("# version,") for l in lines), "cw pmf csv: version line missing")

# --- json output embeds the full config and version --------------------------
proc = run(["cw", "fixed-points", "--beta", "2", "--b", "0.1", "--seed", "3"])
doc = json.loads(proc.stdout)
check(doc["config"]["command"] == "cw fixed-points", "json: command not embedded")
check(doc["config"]["seed"] == 3, "json: seed not embedded")
check(doc["config"]["params"]["beta"] == "2", "json: params not embedded")
check("version" in doc, "json: version missing")
check(len(doc["result"]["roots"]) == 3, "cw fixed-points: expected 3 roots")

# --- validation failure: exit 2 with machine-readable error ------------------
proc = run(["xorsat", "rho-d", "--l", "2"], expect=2)
err = json.loads(proc.stderr)
check(err["error"]["type"] == "validation", "rho-d l=2: error type")
check("l" in err["error"]["message"], "rho-d l=2: message should name the l bound")

proc = run(["xorsat", "rho-d"], expect=2)  # missing required parameter
err = json.loads(proc.stderr)
check("--l" in err["error"]["message"], "missing required parameter message")

proc = run(["nope", "nope"], expect=2)
proc = run(["bp", "run", "--graph", "cycle:6", "--model", "bogus"], expect=2)
proc = run(["bp", "run", "--graph", "cycle:6", "--nonsense", "1"], expect=2)
err = json.loads(proc.stderr)
check("nonsense" in err["error"]["message"], "unknown parameter named in error")

# --- reproducibility: identical bytes for identical configs ------------------
a, b = WORK / "a.json", WORK / "b.json"
args = ["xorsat", "mc", "--l", "3", "--n", "200", "--rho", "1.1",
        "--trials", "40", "--seed", "5"]
run(args + ["--out", str(a)])
run(args + ["--out", str(b)])
check(a.read_bytes() == b.read_bytes(), "same config should reproduce byte-for-byte")
run(["xorsat", "mc", "--l", "3", "--n", "200", "--rho", "1.1",
     "--trials", "40", "--seed", "6", "--out", str(b)])
check(a.read_bytes() != b.read_bytes(), "different seed should change the output")

# --- seed: environment default vs explicit flag ------------------------------
p_env = run(["xorsat", "peel", "--n", "300"], env_extra={"SGM_SEED": "11"})
p_flag = run(["xorsat", "peel", "--n", "300", "--seed", "11"])
d_env, d_flag = json.loads(p_env.stdout), json.loads(p_flag.stdout)
check(d_env["result"] == d_flag["result"], "env seed should match explicit seed")
check(d_env["config"]["seed"] == 11, "env seed recorded in the config")

# --- config file: equivalence, precedence conflicts, unknown keys ------------
cfgfile = WORK / "cfg.json"
cfgfile.write_text(json.dumps({
    "command": "exact logz",
    "seed": 2,
    "params": {"graph": "cycle:6", "model": "ising", "beta": "0.8", "b": "0.1"},
}))
p_cfg = run(["exact", "logz", "--config", str(cfgfile)])
p_direct = run(["exact", "logz", "--graph", "cycle:6", "--model", "ising",
                "--beta", "0.8", "--b", "0.1", "--seed", "2"])
check(json.loads(p_cfg.stdout)["result"] == json.loads(p_direct.stdout)["result"],
      "config file should reproduce the flag run")

proc = run(["exact", "logz", "--config", str(cfgfile), "--beta", "0.9"], expect=2)
err = json.loads(proc.stderr)
check("beta" in err["error"]["message"], "config/flag conflict should name the key")

badcfg = WORK / "bad.json"
badcfg.write_text(json.dumps({"command": "exact logz", "mystery": 1}))
run(["exact", "logz", "--config", str(badcfg)], expect=2)
badcfg.write_text(json.dumps({"command": "exact logz",
                              "params": {"graph": "cycle:4", "zzz": "1"}}))
run(["exact", "logz", "--config", str(badcfg)], expect=2)

# --- numerical failure: exit 3 -----------------------------------------------
# coloring model on a graph with a self-loop has zero partition function
loop = WORK / "loop.txt"
loop.write_text("2 2\n0 1\n1 1\n")
proc = run(["exact", "logz", "--graph", f"file:{loop}", "--model", "coloring",
            "--q", "3"], expect=3)
err = json.loads(proc.stderr)
check(err["error"]["type"] == "numerical", "zero-measure model: numerical error type")

# --- threads flag: accepted, capped, and output-invariant --------------------
p1 = run(["cw", "pmf", "--n", "50", "--beta", "1.5", "--b", "0", "--threads", "1"])
p8 = run(["cw", "pmf", "--n", "50", "--beta", "1.5", "--b", "0", "--threads", "8"])
check(json.loads(p1.stdout)["result"] == json.loads(p8.stdout)["result"],
      "results must not depend on the thread cap")
run(["cw", "pmf", "--n", "50", "--threads", "0"], expect=2)

if failures:
    print("CLI contract failures:")
    for f in failures:
        print(" -", f)
    sys.exit(1)
print(f"cli contract: all checks passed")
