import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import micropolar_inverse as mp

CONFIGS = Path(os.environ.get("MICROPOLAR_CONFIGS",
                              Path(__file__).resolve().parents[2] / "configs"))


def smoke_config():
    return mp.Config.load(str(CONFIGS / "smoke.ini"))


def test_version_and_hash():
    assert mp.__version__
    assert mp.sha256_hex("abc") == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad")


def test_config_round_trip_and_errors():
    c = mp.config(grid__nx=12, monitors__strict=True)
    assert c.get("grid.nx") == "12"
    assert c.get("monitors.strict") == "true"
    assert mp.Config.parse(c.serialize()) == c
    assert "inverse.relaxation" in mp.Config.keys()
    with pytest.raises(mp.ValidationError):
        c.set("grid.nope", 1)
    with pytest.raises(mp.ParseError) as info:
        mp.Config.parse("[grid]\nnx = 8\nbogus line\n")
    assert "line 3" in str(info.value)
    assert issubclass(mp.ParseError, mp.MicropolarError)


def test_divergence_of_gradient_matches_five_point_neumann():
    rng = np.random.default_rng(7)
    ny, nx, lx, ly = 9, 11, 1.0, 1.5
    s = rng.standard_normal((ny, nx))
    gx, gy = mp.gradient(s, lx, ly)
    assert gx.shape == (ny, nx + 1) and gy.shape == (ny + 1, nx)
    lap = mp.divergence(gx, gy, lx, ly)
    dx, dy = lx / nx, ly / ny
    # Cells off the walls only: boundary faces carry one-sided copies.
    expect = ((s[1:-1, 2:] - 2 * s[1:-1, 1:-1] + s[1:-1, :-2]) / dx**2 +
              (s[2:, 1:-1] - 2 * s[1:-1, 1:-1] + s[:-2, 1:-1]) / dy**2)
    inner = lap[1:-1, 1:-1]
    assert np.max(np.abs(inner - expect)) < 1e-10 * np.max(np.abs(expect))
    assert np.array_equal(gx[:, 0], gx[:, 1])
    assert np.array_equal(gy[-1, :], gy[-2, :])


def test_potential_recovers_gradient_shape():
    ny, nx = 16, 16
    y, x = np.meshgrid((np.arange(ny) + 0.5) / ny, (np.arange(nx) + 0.5) / nx,
                       indexing="ij")
    phi = np.cos(np.pi * x) * np.cos(2 * np.pi * y)
    rho = 1.0 + 0.5 * np.exp(-((x - 0.3) ** 2 + (y - 0.6) ** 2) / 0.02)
    mx, my = mp.gradient(phi)
    h, iterations = mp.solve_potential(rho, mx, my)
    assert iterations >= 0
    assert np.max(np.abs(h - (phi - phi.mean()))) < 1e-8
    with pytest.raises(mp.ValidationError):
        mp.solve_potential(rho[:, :-1], mx, my)


def test_differentiate_series_exact_on_quadratics():
    t = np.linspace(0.0, 1.0, 11)
    du, dw = mp.differentiate_series(t, t**2, 3 * t - t**2)
    assert np.allclose(du, 2 * t, atol=1e-12)
    assert np.allclose(dw, 3 - 2 * t, atol=1e-12)


def test_rest_state_observes_zero():
    c = smoke_config()
    c.set("initial.velocity", "rest")
    c.set("initial.microrotation", "rest")
    c.set("sources.profile", "zero")
    out = mp.simulate(c)
    assert np.all(np.array(out["phi_u"]) == 0.0)
    assert np.all(np.array(out["phi_w"]) == 0.0)
    assert out["violations"] == 0


def test_unforced_vortex_loses_energy():
    c = smoke_config()
    c.set("sources.profile", "zero")
    out = mp.simulate(c, keep_states=True)
    energy = np.array(out["energy"])
    assert len(energy) == c.number("time.steps") + 1
    assert np.all(np.diff(energy) <= 1e-12 * energy[0])
    final = out["final"]
    assert final["rho"].shape == (16, 16)
    assert final["u"][0].shape == (16, 17)
    div = mp.divergence(*final["u"])
    assert np.max(np.abs(div)) < 1e-8 * (1 + np.max(np.abs(final["u"][0])))
    assert len(out["states"]) == len(energy)


def test_twin_and_direct_reconstruction_agree(tmp_path):
    c = smoke_config()
    twin = mp.run_twin(c, str(tmp_path / "twin"))
    assert twin["converged"], twin["message"]
    # 16x16 with first-order advection: a few percent, not solver precision.
    assert twin["error_f"] < 0.05 and twin["error_g"] < 0.05

    data = mp.simulate(c)
    direct = mp.reconstruct(c, data["times"], data["phi_u"], data["phi_w"])
    assert direct["status"] == "converged"
    assert direct["iterations"] == twin["iterations"]
    assert np.array_equal(direct["f"], twin["f"])
    assert np.array_equal(direct["g"], twin["g"])

    metrics = json.loads((tmp_path / "twin" / "metrics.json").read_text())
    assert math.isclose(metrics["error_f"], twin["error_f"], rel_tol=1e-12)


def test_incompatible_data_raises():
    c = smoke_config()
    data = mp.simulate(c)
    phi_u = list(data["phi_u"])
    phi_u[0] += 1.0
    with pytest.raises(mp.CompatibilityError):
        mp.reconstruct(c, data["times"], phi_u, data["phi_w"])


def test_files_round_trip(tmp_path):
    c = smoke_config()
    fwd = mp.run_forward(c, str(tmp_path / "fwd"))
    assert (tmp_path / "fwd" / "manifest.json").exists()
    replay = mp.Config.from_file(str(tmp_path / "fwd" / "manifest.json"))
    assert replay == c

    inv = mp.run_invert(c, str(tmp_path / "fwd" / "observations.csv"),
                        str(tmp_path / "inv"))
    assert inv["converged"]

    diag = mp.run_diagnose(str(tmp_path / "fwd" / "trajectory"),
                           str(tmp_path / "diag"))
    assert diag["violations"] == fwd["violations"] == 0
    assert diag["records"] == len(fwd["times"])


def test_invalid_physics_names_the_condition():
    c = smoke_config()
    c.set("physics.c_a", 100.0)
    with pytest.raises(mp.ValidationError, match=r"c_0\+c_d>c_a"):
        mp.simulate(c)
