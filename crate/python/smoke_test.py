"""Smoke test for the pygwsr extension: build with `maturin develop` in crates/python."""

import math

import pygwsr

THETA0 = 0.8 * math.pi


def main():
    fm, ft, g_exact, g_series = pygwsr.kernels(0.0, 0.5)
    assert fm == 1.0 and ft == 0.0 and g_exact == 0.0

    geom = pygwsr.ArrayGeometry(100, 1.0)
    assert abs(geom.mu_mink_n()) <= 1e-12
    signal = pygwsr.GwSignal(1e-21, 1e-2)
    shape = pygwsr.ShapeFactors.compute(geom, signal)
    assert abs(shape.eta - 22.0714167) < 1e-6, shape

    assert 0.2 <= pygwsr.boundary(100) <= 0.3
    j = pygwsr.eta_max(1.0, 1e-8, "envelope")
    assert 3e6 <= j <= 1e8, j

    curve = pygwsr.emission_curve(geom, shape, THETA0, samples=64)
    assert len(curve["t"]) == 64 and all(g >= 0 for g in curve["gamma"])
    t_peak, value = pygwsr.peak(geom, shape, THETA0)
    assert 0.0 < t_peak <= 1.5 and value > 0

    exponent = pygwsr.scaling_exponent([1000, 10000, 100000], 1.0, pygwsr.GwSignal(1e-21, 1e-12), THETA0)
    assert 1.8 <= exponent <= 2.05, exponent

    profile = pygwsr.angular_profile(pygwsr.ArrayGeometry(10, 1.0), signal, THETA0, phi_samples=32)
    assert len(profile["phi"]) == 32

    reports = pygwsr.validate("kernels")
    assert reports and all(r[3] for r in reports), reports

    try:
        pygwsr.ArrayGeometry(1, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("single-atom array accepted")

    print(f"pygwsr smoke test passed: eta={shape.eta:.6f} eta_max={j} exponent={exponent:.4f}")


if __name__ == "__main__":
    main()
