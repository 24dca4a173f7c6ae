"""Smoke test for the `umbilic` extension module.

Build and install first, e.g. `pip install maturin && maturin develop -m crates/python/Cargo.toml`.
"""

import math

import umbilic


def main():
    fig2b = umbilic.Surface.family(8, [1 / 28, 0, 0.987143, 0, 0, 0, 2, 0, 1])
    assert fig2b.origin_is_umbilic()

    inner = umbilic.index_at(fig2b, [0.0, 0.0], 0.08)
    outer = umbilic.index_at(fig2b, [0.0, 0.0], 0.12)
    assert inner.index == 1.0 and outer.index == 0.0, (inner, outer)
    assert all(-0.25 <= psi <= 0.25 for _, psi in inner.samples)

    found = umbilic.find_umbilics(fig2b, 0.2)
    stars = [u for u in found if u.classification == "star"]
    assert len(stars) == 2, found
    for u in stars:
        assert abs(abs(u.location[0]) - 0.1) < 0.02 and u.index == -0.5 and u.J < 0
    assert outer.index == inner.index + sum(u.index for u in stars)

    m = umbilic.monge_at_umbilic(fig2b, stars[0].location)
    assert m.classification == "star" and m.J < 0

    sphere = umbilic.Surface(True, [0.0, 0.0, 0.0], [], 0.9)
    assert max(abs(c) for c in sphere.rodrigues(0.3, -0.2)) < 1e-13

    p = umbilic.Surface.paraboloid(0.4, 0.0, 0.5)
    locs = sorted(umbilic.paraboloid_umbilics(0.4, 0.0, 0.5))
    assert all(abs(x) < 1e-12 and abs(abs(y) - 0.5) < 1e-12 for x, y in locs), locs
    pr = p.principal(0.1, 0.0)
    assert pr.kappa_max > pr.kappa_min and not pr.umbilic

    fig1 = umbilic.Surface.family(8, [1, 1, 1, 0, 0, 0, 1, 0, 1])
    t = umbilic.integrate_curvature_line(fig1, [0.1, 0.0], "max", bounds=[-0.2, 0.2, -0.2, 0.2])
    assert t.termination in ("reached_boundary", "near_umbilic") and len(t.points) > 10

    returns, how = umbilic.poincare_returns(
        umbilic.Surface.paraboloid(0.5, 0.0, 0.5), [0.0, -1.0], [0.0, -0.1], 5
    )
    assert len(returns) == 5 and max(abs(r - 0.1) for r in returns) < 1e-8, returns

    try:
        umbilic.index_at(p, [0.0, 0.0], 0.5)
    except umbilic.NumericalError as e:
        assert "umbilic on contour" in str(e)
    else:
        raise AssertionError("circle through an umbilic must fail")

    try:
        umbilic.Surface.family(7, [1.0] * 8)
    except ValueError:
        pass
    else:
        raise AssertionError("odd degree must be rejected")

    rebuilt = umbilic.Surface.from_json(fig2b.to_json())
    assert math.isclose(rebuilt.height(0.05, 0.02), fig2b.height(0.05, 0.02), rel_tol=0, abs_tol=0)
    print("umbilic smoke test ok")


if __name__ == "__main__":
    main()
