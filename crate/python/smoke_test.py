#!/usr/bin/env python3
"""Smoke test for the wbv_py extension module.

Builds the cdylib with cargo if needed, loads it, and exercises the main
operations end to end. Exits nonzero on the first failed check.
"""

import math
import pathlib
import shutil
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def ensure_module():
    target = ROOT / "target" / "release" / "libwbv_py.so"
    dest = HERE / "wbv_py.so"
    if not target.exists():
        subprocess.run(
            ["cargo", "build", "--release", "-p", "wbv-py"], cwd=ROOT, check=True
        )
    if not dest.exists() or target.stat().st_mtime > dest.stat().st_mtime:
        shutil.copy2(target, dest)
    sys.path.insert(0, str(HERE))


def check(label, ok):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}")
    if not ok:
        sys.exit(1)


def main():
    ensure_module()
    import wbv_py

    step = wbv_py.Weight("step(threshold=0, low=1, high=2)")
    check("step weight eval", step.eval([-1.0]) == 1.0 and step.eval([1.0]) == 2.0)
    check("step weight a1", step.known_a1() == 2.0)

    ind = wbv_py.Piecewise1D.indicator(0.0, 1.0)
    v = wbv_py.variation_1d(ind, step, -2.0, 2.0)
    check(f"indicator variation = {v}", v == 3.0)

    f = wbv_py.GridFunc([-2.0], [2.0], [4096], lambda x: 1.0 if 0.0 < x[0] < 1.0 else 0.0)
    tv = wbv_py.weighted_tv(f, step)
    check(f"grid variation = {tv}", abs(tv - 3.0) < 1e-9)

    power = wbv_py.Weight("power(alpha=-0.5)")
    p = wbv_py.perimeter_1d([(0.0, 1.0)], power)
    check(f"singular perimeter = {p}", math.isinf(p))

    a1 = wbv_py.estimate_a1(power, -2.0, 2.0, 2048)
    check(f"a1 estimate = {a1:.6f}", abs(a1 - 2.0) < 0.02)

    _, diag = wbv_py.smooth_approximate(f, step, 0.02)
    check(
        f"smooth approx l1={diag['l1_error']:.4f} ratio={diag['tv_ratio']:.4f}",
        diag["l1_error"] < 0.02 and 0.99 <= diag["tv_ratio"] <= 2.01,
    )

    affine = wbv_py.Weight("radial(profile=affine, a=1, b=1)")
    rep = wbv_py.coarea(wbv_py.Piecewise1D.tent(), affine, -2.0, 2.0, 400)
    check(
        f"level-set identity gap = {rep['relative_gap']:.2e}",
        rep["relative_gap"] is not None and rep["relative_gap"] < 1e-3,
    )

    iso = wbv_py.isometry_interval(0.0, 1.0, step, -2.0, 2.0)
    check(
        f"lift isometry {iso['weighted_value']} vs {iso['lifted_value']}",
        iso["perimeter_gap"] == 0.0 and iso["l1_gap"] < 1e-6,
    )

    c1 = wbv_py.calibrate_sobolev()
    check(
        f"sobolev constant = {c1:.6f}",
        abs(c1 - 1.0 / (2.0 * math.sqrt(math.pi))) < 0.01,
    )

    names = [n for n, _ in wbv_py.fixture_catalog()]
    check(f"fixture catalog ({len(names)} entries)", len(names) == 12)

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
