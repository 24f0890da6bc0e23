"""Compare the compiled and pure-Python polynomial kernels.

Runs the same workloads twice, once with the default backend and once with
QSPHERE_PURE_PYTHON=1, each in a fresh interpreter so the import-time backend
choice and the gcd cache start cold.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, random, time
from qsphere import kernels
from qsphere import _kernels_py

def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter(); fn(); times.append(time.perf_counter() - t)
    return min(times)

rng = random.Random(7)
pairs = []
for _ in range(400):
    c = tuple(rng.randint(-5, 5) for _ in range(4)) + (1,)
    a = kernels.pmul(tuple(rng.randint(-9, 9) for _ in range(6)) + (1,), c)
    b = kernels.pmul(tuple(rng.randint(-9, 9) for _ in range(5)) + (1,), c)
    pairs.append((a, b))
impl = kernels._impl

def gcds():
    for a, b in pairs:
        impl.pgcd(a, b)

def muls():
    for a, b in pairs:
        impl.pmul(a, b)

def workload():
    from qsphere.suites import run_suite
    kernels.pgcd.cache_clear()
    assert run_suite("first-order", 4, sign=1).passed

out = {"backend": kernels.BACKEND,
       "pgcd x400": best(gcds, REPEAT),
       "pmul x400": best(muls, REPEAT),
       "first-order suite N=4": best(workload, 1)}
print(json.dumps(out))
"""


def run(pure: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("QSPHERE_PURE_PYTHON", None)
    if pure:
        env["QSPHERE_PURE_PYTHON"] = "1"
    code = WORKER.replace("REPEAT", str(repeat))
    res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast = run(False, args.repeat)
    slow = run(True, args.repeat)
    if fast["backend"] != "cython":
        print("note: compiled kernels are not built, both columns use pure Python")
    print(f"{'workload':<26}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for key in fast:
        if key == "backend":
            continue
        print(f"{key:<26}{fast[key]:>11.3f}s{slow[key]:>11.3f}s{slow[key] / fast[key]:>9.2f}x")


if __name__ == "__main__":
    main()
