"""Smoke test for the voltype extension module.

Build and install first:  pip install --no-build-isolation ./crates/python
Then run:                 python python/smoke_test.py
"""

import math

import numpy as np

import voltype


def check(name, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return ok


def main():
    results = []

    x = voltype.Configuration([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    results.append(check("volume type of three points", x.volume_type() == [1.0, 1.0, -1.0]))
    results.append(check("labels", x.volume_labels() == ["v_1_2", "v_1_3", "v_2_3"]))

    rng = np.random.default_rng(7)
    pts = rng.uniform(-1, 1, size=(5, 3))
    vt = voltype.volume_type(pts.tolist())
    dets = [np.linalg.det(pts[list(s)]) for s in [(0, 1, 2), (0, 1, 3), (0, 1, 4)]]
    results.append(check("agrees with numpy determinants", np.allclose(vt[:3], dets, rtol=1e-12)))

    g0 = [[2.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 3.0, 1.0]]
    cx = voltype.Configuration(pts.tolist())
    cy = cx.transformed(g0)
    g = voltype.recover_group_element(cx, cy)
    results.append(check("recovers g0", np.allclose(g, g0, atol=1e-9)))
    results.append(check("same volume type", voltype.same_volume_type(cx, cy)))
    scaled = cx.transformed([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    results.append(check("det 2 map is not in the orbit", not voltype.same_volume_type(cx, scaled)))

    c = cx.canonical()
    results.append(check("chart round trip", np.allclose(c.embed(), cx.volume_type(), rtol=1e-9)))
    jac = c.jacobian()
    results.append(check("jacobian full rank", jac["full_rank"] and jac["rank"] == voltype.manifold_dim(5, 3)))

    s = voltype.ThickenedSet.sharpness(2, 1.0, 2)
    results.append(check("q=2 count is 13", s.count_distinct(2)["distinct_count"] == 13))
    report = voltype.sharpness([8, 16, 32], 1.0)
    results.append(check("sharpness slope present", report["slope"] is not None and 2.0 < report["slope"] < 3.5))

    hyper = voltype.ThickenedSet.hyperplane([1.0, 2.0], 1000, seed=1)
    boxes = hyper.box_count(2, [0.5, 0.01], samples=10000)
    results.append(check("hyperplane one box", all(b["occupied_boxes"] == 1 for b in boxes)))

    two = voltype.ThickenedSet.from_points([[1.0, 0.0], [0.0, 1.0]])
    stat = two.pair_statistic(2, [1e-3], pairs=200000, seed=3)[0]
    results.append(check("two-point pair statistic", abs(1e-3 * stat["statistic"] - 0.375) < 0.01))

    lp = voltype.spectral("cantor")
    target = 1 - math.log(2) / math.log(3)
    results.append(check("cantor spectral slope", abs(lp["fitted_slope_sup"] - target) < 0.1))

    try:
        flat = voltype.Configuration([[1.0, 1.0], [2.0, 2.0]])
        voltype.recover_group_element(flat, flat)
        results.append(check("degenerate input raises", False))
    except ValueError as e:
        results.append(check("degenerate input raises", "degenerate" in str(e)))

    print(f"{sum(results)}/{len(results)} checks passed")
    raise SystemExit(0 if all(results) else 1)


if __name__ == "__main__":
    main()
