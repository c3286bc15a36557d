"""Smoke test for the Python bindings.

Build and install first:  pip install --no-build-isolation -e crates/py
"""

import cmath
import math
from pathlib import Path

import semiclassical_py as sc

MODEL = Path(__file__).resolve().parents[2] / "core" / "models" / "landau_zener.conf"


def main() -> None:
    tau = sc.lifetime(0.12522)
    assert abs(tau - 547.3) / 547.3 < 5e-3, tau

    tau, t_c, ratio = sc.escape_time(0.17888)
    assert 20.0 < t_c < 100.0 and abs(ratio - t_c / tau) < 1e-12

    path = sc.trajectory(0.178885, 10.0, dt=1.0)
    assert len(path) == 11 and isinstance(path[0][1], complex)

    for g in (0.05, 0.1):
        assert abs(g * g * sc.barrier(g) - 2.0 / 15.0) < 1e-10

    osc = sc.Potential.harmonic(1.0)
    good = osc.levels(5)
    bad = osc.levels(5, alpha=0.0)
    assert all(abs(e - (n + 0.5)) < 1e-9 for n, e in enumerate(good)), good
    assert all(abs(e - n) < 1e-9 for n, e in enumerate(bad)), bad

    h = sc.hydrogen_levels(2)
    assert abs(h[0] + 0.5) < 1e-4 and abs(h[1] + 0.125) < 1e-4

    lz = sc.ChannelSystem.load(str(MODEL))
    assert lz.channels == 2
    again = sc.parse_model_text(lz.to_config())
    assert again.to_config() == lz.to_config()
    rows = lz.emergence_sweep([1.0, 10.0])
    assert rows[1]["discrepancy"] < rows[0]["discrepancy"]
    assert max(r["max_norm_deviation"] for r in rows) < 1e-8
    td = lz.with_energy(4.0).solve_time_dependent()
    assert abs(sum(td["probabilities"]) - 1.0) < 1e-8

    try:
        sc.ChannelSystem.landau_zener(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative energy accepted")

    orbit = sc.Orbit.linear_model()
    pole = orbit.find_pole(1, 1, complex(6.0, -2.5))
    assert abs(pole - complex(2 * math.pi, -3.0)) < 1e-10
    assert abs(orbit.response(pole + 1e-6)) > 1e5
    assert cmath.isfinite(orbit.response(complex(1.0, 0.0)))

    print("smoke test passed")


if __name__ == "__main__":
    main()
