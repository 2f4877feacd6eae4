"""Smoke test for the widomlab_py extension.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import json
import math
import tempfile

import widomlab_py as wl


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b}"


def main():
    unit = wl.BandSet([(-1.0, 1.0)])
    close(unit.capacity(), 0.5, 1e-14)
    close(unit.green(2.0), math.log(2.0 + math.sqrt(3.0)), 1e-12)

    lo, hi = unit.widom_infty(5)
    assert lo <= 2.0 <= hi and hi - lo < 1e-8

    one_minus_x2 = json.dumps(
        {"kind": "abs_rational", "r": {"c": -1.0, "zeros": [[1.0, 0.0], [-1.0, 0.0]]}}
    )
    close(2.0 * unit.szego(one_minus_x2), 0.5, 1e-12)
    w2 = unit.widom_2_squared(8, one_minus_x2)
    plain = unit.widom_2_squared(8)
    for k in range(1, 9):
        close(w2[k], 0.5, 1e-9)
        close(plain[k], 2.0, 1e-9)

    two = wl.BandSet([(-1.0, -0.5), (0.5, 1.0)])
    close(two.capacity(), math.sqrt(3.0) / 4.0, 1e-12)
    coeffs = two.chebyshev_polynomial(2)
    close(coeffs[2], 1.0, 1e-12)
    close(coeffs[0], -0.625, 1e-9)

    reports = json.loads(two.bound_audit(4))
    assert reports
    for r in reports:
        if r["status"] == "guaranteed":
            assert r["margin"] >= -1e-9, r

    a, b = wl.cantor_widom_exact(0.125, 3)
    close(a, 4.0, 1e-12)
    close(b * b, 12.0, 1e-11)
    close(wl.cantor_capacity(0.125), 0.125, 1e-12)
    e3 = wl.BandSet.cantor_level(0.125, 3)
    assert len(e3.bands()) == 8

    cfg = json.dumps({"kind": "capacity-table", "sets": [{"bands": [[-1, 1]]}]})
    with tempfile.TemporaryDirectory() as out:
        report = json.loads(wl.run_experiment(cfg, out))
    assert report["run"]["failures"] == []

    print("smoke test ok")


if __name__ == "__main__":
    main()
