import math

import numpy as np
import pytest

import smamicro as sm


def test_mesh_counts():
    mesh = sm.Mesh2D.structured(16, 8)
    assert mesh.num_triangles == 256
    assert mesh.num_nodes == 153
    assert mesh.num_interior_edges == 360
    assert mesh.nodes.shape == (153, 2)
    assert math.isclose(mesh.total_area(), 2.0, abs_tol=1e-12)
    assert mesh.boundary_counts(sm.BoundaryKind.clamped)["dirichlet"] == 48
    ribbon = mesh.boundary_counts(sm.BoundaryKind.sheared_ribbon)
    assert (ribbon["dirichlet"], ribbon["periodic"]) == (18, 15)


def test_densities():
    assert sm.mooney_rivlin(np.eye(2)) == 3.0
    assert sm.mooney_rivlin(np.diag([2.0, 0.5])) == pytest.approx(5.25)
    assert sm.mooney_rivlin(np.diag([1.0, -1.0])) is None
    material = sm.Material(sm.MaterialParams())
    f1 = material.stretch(sm.Variant.first)
    assert sm.variant_density(f1, sm.Variant.first, material) == 3.0
    assert np.abs(sm.variant_density_gradient(f1, sm.Variant.first, material)).max() <= 1e-12
    assert sm.edge_stretch(f1, np.array([0.0, 1.0])) == pytest.approx(math.sqrt(1.09))


def test_phase_solver_and_lp():
    unary = [-0.5, 0.4]
    pairwise = [(0, 1, 0.3)]
    z = sm.solve_phase(unary, pairwise)
    assert z == [1, 0]
    assert sm.phase_objective(unary, pairwise, z) == pytest.approx(-0.2)
    report = sm.lp_relaxation_check(unary, pairwise, z)
    assert report["candidate_optimal"]
    assert report["sigma_identity"]
    assert sm.solve_phase([0.0], [], [1]) == [1]


def test_config_roundtrip_and_rejection():
    config = sm.parse_config("[run]\npreset = example2\n[material]\nbeta = 0.2\n")
    assert config.material.alpha_i == pytest.approx(0.001)
    assert sm.parse_config(sm.serialize_config(config)) == config
    with pytest.raises(sm.ConfigError):
        sm.parse_config("[material]\ndelta2 = 5\n")
    with pytest.raises(sm.ConfigError):
        sm.parse_config("[mesh]\nnz = 3\n")


def test_small_run_is_deterministic():
    config = sm.RunConfig.for_preset(sm.Preset.example1)
    config.nx, config.ny, config.n_steps = 8, 4, 8
    first = sm.run(config)
    second = sm.run(config)
    assert first["complete"]
    assert len(first["ledger"]) == 9
    assert first["ledger"] == second["ledger"]
    assert all(np.array_equal(a, b) for a, b in zip(first["y"], second["y"]))
    cumulative = [row["Diss_cum"] for row in first["ledger"]]
    assert cumulative == sorted(cumulative)


def test_run_directory(tmp_path):
    config = sm.RunConfig.for_preset(sm.Preset.example2)
    config.nx, config.ny, config.n_steps = 8, 4, 4
    config.output = str(tmp_path / "run")
    code, log = sm.run_to_directory(config)
    assert code == sm.ExitCode.ok, log
    assert len(list((tmp_path / "run" / "snapshots").iterdir())) == 5
    header = (tmp_path / "run" / "ledger.csv").read_text().splitlines()[0]
    assert header.startswith("k,t,a,E_bulk,E_int1,E_int2,D_inc,Diss_cum,frac_z1")
    code, log = sm.diagnose_directory(config.output)
    assert code in (sm.ExitCode.ok, sm.ExitCode.diagnostics_failed)
    assert "k=4" in log
