#!/usr/bin/env python3
"""Smoke test for the stable_centres_py extension module.

Builds the cdylib with cargo, loads it, and checks a handful of known exact
values end to end: q-combinatorics, group orders, class data, centre
products, and one interpolation run with holdout.
"""

import json
import pathlib
import shutil
import subprocess
import sys
import sysconfig
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_and_import():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "stable-centres-py"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libstable_centres_py.so"
    if not built.exists():  # e.g. macOS
        built = ROOT / "target" / "release" / "libstable_centres_py.dylib"
    suffix = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    staging = pathlib.Path(tempfile.mkdtemp(prefix="stable_centres_py_"))
    shutil.copy2(built, staging / f"stable_centres_py{suffix}")
    sys.path.insert(0, str(staging))
    import stable_centres_py

    return stable_centres_py


def main():
    m = build_and_import()

    # q-combinatorics
    assert m.q_int(3, 2) == 7
    assert m.q_binomial(4, 2, 2) == 35
    assert m.q_binomial(2, 1, -2) == -1
    assert m.gauss_poly_coeffs(4, 2) == [1, 1, 2, 1, 1]

    eng = m.Engine()

    # group orders against the closed formulas
    assert eng.group_order("gl", 2, 3) == 168
    assert eng.group_order("sp", 2, 2) == 720
    assert eng.group_order("u", 2, 2) == 18
    assert eng.group_order("oodd", 3, 1) == 48

    # class data of GL_2(F_2) = S_3
    rows = eng.classes("gl", 2, 2)
    assert len(rows) == 3
    assert sorted(r["size"] for r in rows) == [1, 2, 3]
    for r in rows:
        assert r["size"] * r["centralizer"] == 6

    # the transposition-sum square in S_3 coordinates
    tv = "gl,q=2;t+1:(1)"
    prod = eng.multiply("gl", 2, 2, tv, tv)
    assert prod["gl,q=2;"] == 3
    assert prod["gl,q=2;t^2+t+1:(1)"] == 3
    assert eng.structure_constant(tv, tv, "gl,q=2;", 3) == 21

    # interpolation in t = 2^n with exact holdout at n = 5
    report = json.loads(eng.interpolate("gl", 2, tv, tv, [1, 2, 3, 4], [5]))
    assert report["fits"], "no fits returned"
    for fit in report["fits"]:
        assert fit["fit"]["degree_ok"], fit
        for h in fit["fit"]["holdout"]:
            assert h["matched"], fit
    idfit = next(f for f in report["fits"] if f["lambda"] == "gl,q=2;")
    # a_{tv,tv}^id(n) = (t-1)(t-2)/2: coefficients 1, -3/2, 1/2
    assert idfit["fit"]["coefficients"] == ["1", "-3/2", "1/2"]

    # a verification suite end to end
    verdict = json.loads(eng.verify("orders"))
    assert verdict["passed"]

    print("python smoke test: PASS")


if __name__ == "__main__":
    main()
