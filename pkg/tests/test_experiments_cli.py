import json
import subprocess
import sys

import numpy as np
import pytest

from shadowlp.errors import ConfigError
from shadowlp.experiments import (
    CONE_SCHEMA,
    SCALING_SCHEMA,
    cone_run,
    lowerbound_run,
    LOWERBOUND_SCHEMA,
    parse_config,
    polygon_product_rows,
    rows_to_csv,
    shadow_scaling_run,
    SCALING_COLUMNS,
)
from shadowlp.instance import dump_instance

from helpers import cube_instance, infeasible_instance, unbounded_in_c_instance
from shadowlp.rng import RngStream


TINY_SCALING = """
experiment = shadow_scaling
d = 3
n = 12
sigma_grid = 0.05, 0.2
trials = 3
seed = 11
"""


def test_parse_config_behaviour():
    cfg = parse_config(TINY_SCALING, SCALING_SCHEMA)
    assert cfg["d"] == 3 and cfg["sigma_grid"] == [0.05, 0.2]
    assert cfg["family"] == "product"  # default
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("experiment = shadow_scaling\nbogus = 1\n", SCALING_SCHEMA)
    with pytest.raises(ConfigError, match="missing required"):
        parse_config("experiment = shadow_scaling\n", SCALING_SCHEMA)
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config(TINY_SCALING + "d = 4\n", SCALING_SCHEMA)
    # invariants are enforced when the study starts
    with pytest.raises(ConfigError, match="strictly increasing"):
        shadow_scaling_run(
            parse_config(TINY_SCALING.replace("0.05, 0.2", "0.2, 0.05"), SCALING_SCHEMA)
        )
    with pytest.raises(ConfigError, match="family"):
        shadow_scaling_run(
            parse_config(
                "experiment=shadow_scaling\nd=3\nn=12\ntrials=1\nsigma_grid=0.1\nfamily=weird\n",
                SCALING_SCHEMA,
            )
        )


def test_polygon_product_rows_shape():
    rows = polygon_product_rows(4, 50)
    assert rows.shape == (50, 4)
    assert np.allclose(np.linalg.norm(rows, axis=1), 1.0)
    rows5 = polygon_product_rows(5, 21)
    assert rows5.shape == (21, 5)


def test_scaling_run_rows_and_summary():
    cfg = parse_config(TINY_SCALING, SCALING_SCHEMA)
    rows, summary = shadow_scaling_run(cfg)
    assert len(rows) == 6
    assert all(r["outcome"] == "optimal" for r in rows)
    assert summary["per_sigma"][0]["trials_ok"] == 3
    assert np.isfinite(summary["loglog_slope"])
    csv_text = rows_to_csv(SCALING_COLUMNS, rows)
    assert csv_text.splitlines()[0].startswith("schema_version,experiment")
    assert len(csv_text.splitlines()) == 7


def test_scaling_run_deterministic_and_parallel():
    cfg = parse_config(TINY_SCALING, SCALING_SCHEMA)
    rows1, _ = shadow_scaling_run(cfg, jobs=1)
    rows2, _ = shadow_scaling_run(cfg, jobs=2)
    assert rows_to_csv(SCALING_COLUMNS, rows1) == rows_to_csv(SCALING_COLUMNS, rows2)


def test_single_trial_summary_degenerates_gracefully():
    cfg = parse_config(TINY_SCALING.replace("trials = 3", "trials = 1"), SCALING_SCHEMA)
    rows, summary = shadow_scaling_run(cfg)
    assert len(rows) == 2
    assert all(np.isfinite(p["mean_pivots"]) for p in summary["per_sigma"])


def test_cone_run_small():
    cfg = parse_config("experiment = cone\nd = 3\nconfigs = 4\ntrials = 20000\nseed = 2\n", CONE_SCHEMA)
    rows, summary = cone_run(cfg)
    assert len(rows) == 4
    assert summary["all_satisfied"]


def test_lowerbound_run_small():
    cfg = parse_config(
        "experiment = lowerbound\nd = 3\nsigma = 0.02\neta = 0.15\nruns = 1\n"
        "pad = false\naudit_samples = 20000\nseed = 8\n",
        LOWERBOUND_SCHEMA,
    )
    rows, summary = lowerbound_run(cfg)
    assert rows[0]["outcome"] == "optimal"
    assert rows[0]["bound_holds"] is True
    assert summary["bound_holds_all"]


def _run_cli(args, env_extra=None, cwd=None):
    import os

    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "shadowlp.cli", *args],
        capture_output=True, text=True, env=env, cwd=cwd,
    )


def test_cli_solve_exit_codes(tmp_path):
    box = tmp_path / "box.txt"
    dump_instance(cube_instance(c=np.array([1.0, 0.3, -0.2])), box)
    res = _run_cli(["solve", str(box), "--seed", "3"])
    assert res.returncode == 0
    doc = json.loads(res.stdout)
    assert doc["outcome"] == "optimal"
    assert doc["pivots"]["total"] == sum(
        doc["pivots"][k] for k in ("phase1", "phase2", "phase3")
    )

    gen = RngStream(80, 0).generator()
    infeas = tmp_path / "infeasible.txt"
    dump_instance(infeasible_instance(gen, 3, 9), infeas)
    res = _run_cli(["solve", str(infeas), "--seed", "3"])
    assert res.returncode == 2
    assert "certificate" in json.loads(res.stdout)

    unb = tmp_path / "unbounded.txt"
    dump_instance(unbounded_in_c_instance(gen, 3, 12), unb)
    res = _run_cli(["solve", str(unb), "--seed", "3"])
    assert res.returncode == 3
    assert "ray" in json.loads(res.stdout)

    bad = tmp_path / "bad.txt"
    bad.write_text("2 3\n1 2\n")
    res = _run_cli(["solve", str(bad)])
    assert res.returncode == 1
    assert res.stdout == ""
    assert "error" in res.stderr


def test_cli_experiment_outputs_and_env_dir(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text(TINY_SCALING)
    outdir = tmp_path / "results"
    res = _run_cli(
        ["experiment", str(cfgfile)], env_extra={"SHADOWLP_OUT": str(outdir)}
    )
    assert res.returncode == 0, res.stderr
    assert (outdir / "shadow_scaling.csv").exists()
    assert (outdir / "shadow_scaling_summary.json").exists()
    assert (outdir / "shadow_scaling.svg").exists()
    summary = json.loads((outdir / "shadow_scaling_summary.json").read_text())
    assert summary["experiment"] == "shadow_scaling"


def test_cli_unknown_config_key_fails(tmp_path):
    cfgfile = tmp_path / "exp.cfg"
    cfgfile.write_text(TINY_SCALING + "typo_key = 1\n")
    res = _run_cli(["experiment", str(cfgfile), "--out", str(tmp_path / "o")])
    assert res.returncode == 1
    assert "unknown key" in res.stderr


def test_cli_rejects_config_for_other_experiment(tmp_path):
    cfgfile = tmp_path / "cone.cfg"
    cfgfile.write_text("experiment = cone\nd = 3\nconfigs = 1\ntrials = 100\n")
    res = _run_cli(["lowerbound", str(cfgfile), "--out", str(tmp_path / "o")])
    assert res.returncode == 1


def test_wall_time_column_is_optional_and_isolated():
    cfg = parse_config(TINY_SCALING + "record_wall_time = true\n", SCALING_SCHEMA)
    rows, _ = shadow_scaling_run(cfg)
    assert all("wall_time_s" in r for r in rows)
    cols = SCALING_COLUMNS + ["wall_time_s"]
    text = rows_to_csv(cols, rows)
    assert text.splitlines()[0].endswith(",wall_time_s")
    # every non-timing column matches the timing-free run byte for byte
    plain_rows, _ = shadow_scaling_run(parse_config(TINY_SCALING, SCALING_SCHEMA))
    stripped = [{k: v for k, v in r.items() if k != "wall_time_s"} for r in rows]
    assert rows_to_csv(SCALING_COLUMNS, stripped) == rows_to_csv(SCALING_COLUMNS, plain_rows)
