"""Smoke test for the persivol Python extension.

Build and install first, e.g. `maturin develop --release -m crates/python/Cargo.toml`
or `pip install crates/python`, then run `python python/smoke_test.py`.
"""

import json
import math

import persivol


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    disk = persivol.Shape.ball(2, 1.0)
    vols = disk.intrinsic_volumes(0.04)
    assert all(close(v, w, 1e-12) for v, w in zip(vols, [1.0, 1.04 * math.pi, 1.0816 * math.pi])), vols
    assert close(disk.steiner_value(0.5), math.pi * 1.5**2, 1e-12)

    basis = persivol.legendre_basis(2, 1.0)
    assert len(basis) == 3 and close(basis[0][0], 1.0, 1e-15)
    # Inner products of Q(r) = π(1 + r)² with the basis give back (1, π, π).
    q = [math.pi, 2 * math.pi, math.pi]
    a = [sum(qi * pj / (i + j + 1) for i, qi in enumerate(q) for j, pj in enumerate(p)) for p in basis]
    v = persivol.project_and_extract(a, 2, 1.0)
    assert all(close(x, y, 1e-10) for x, y in zip(v, [1.0, math.pi, math.pi])), v
    assert persivol.error_constant(0, 1) == 8.0

    d1 = persivol.PersistenceDiagram([(0, 0.0, float("inf")), (0, 0.2, 0.5)])
    d2 = persivol.PersistenceDiagram([(0, 0.1, float("inf"))])
    assert close(persivol.bottleneck_distance(d1, d2), 0.15, 1e-12)
    assert persivol.chi_profile(d1, 1.0) == ([0.0, 0.2, 0.5, 1.0], [1, 2, 1])

    c = persivol.PairComplex.random(100, 2, 3)
    assert c.image_persistence().bars() == c.oracle_diagram().bars()

    cloud = persivol.Shape.ball(2, 0.3).sample(800, 1).perturb(0.03, 2)
    assert len(cloud) == 800 and cloud.dim == 2
    cfg = persivol.EstimatorConfig(0.03, 0.02, 200, 5, 2, r_max=0.3)
    est = persivol.estimate_volumes(cloud, cfg, workers=1)
    again = persivol.estimate_volumes(cloud, cfg, workers=2)
    assert est.to_json() == again.to_json()
    report = json.loads(est.to_json())
    assert report["samplesUsed"] == 200 and len(est.values) == 3
    probes = persivol.steiner_function_probe(cloud, cfg, [0.0, 0.3])
    assert probes[0][1] <= probes[1][1]

    try:
        persivol.EstimatorConfig(0.0, 0.02, 10, 0, 2)
    except ValueError:
        pass
    else:
        raise AssertionError("non-positive epsilon must be rejected")

    print("persivol", persivol.__version__, "smoke test passed:", [round(x, 3) for x in est.values])


if __name__ == "__main__":
    main()
