import csv
import json

import numpy as np
import pytest

from paapa import ModelParams, Variant, grow
from paapa import io as pio
from paapa.cli import main
from paapa.experiment import final_degrees, grow_replicas
from paapa.seeding import derive_seed


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_edge_list_round_trip(tmp_path):
    g = grow(ModelParams(m=3, p=0.4, horizon=80, seed=1)).state
    path = tmp_path / "e.csv"
    pio.write_edge_list(path, g)
    steps, src, dst = pio.read_edge_list(path)
    want = g.edge_arrays()
    for a, b in zip((steps, src, dst), want):
        assert np.array_equal(a, b)
    assert np.array_equal(pio.degrees_from_edges(src, dst), g.degrees)


def test_edge_list_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,1,1\n")
    with pytest.raises(ValueError):
        pio.read_edge_list(path)


def test_metadata_carries_seeds():
    prm = ModelParams(m=2, p=0.1, horizon=10, seed=99, replicas=3)
    doc = pio.metadata(prm)
    assert doc["replica_seeds"] == [derive_seed(99, r) for r in range(3)]
    assert pio.metadata(prm, 1)["replica_seed"] == derive_seed(99, 1)
    assert doc["variant"] == "PA-APA" and doc["T"] == 10


def test_grow_command(tmp_path):
    assert main(["grow", "m=1", "p=0", "T=1", "seed=7", "--out", str(tmp_path)]) == 0
    assert ["2", "1", "1.0"] in read_csv(tmp_path / "hist_t1.csv")
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["seed"] == 7 and meta["replica_seeds"] == [derive_seed(7, 0)]


def test_grow_outputs(tmp_path):
    rc = main(["grow", "--m", "2", "--p", "0.5", "--t", "300", "--replicas", "3",
               "--checkpoints", "50,300", "--edge-list", "--out", str(tmp_path)])
    assert rc == 0
    rows = read_csv(tmp_path / "trajectory.csv")
    assert rows[0] == ["t", "mean_degree", "replicas"] and len(rows) == 3
    hist = read_csv(tmp_path / "hist_t300.csv")
    assert sum(int(r[1]) for r in hist[1:]) == 900
    assert (tmp_path / "edges_r2.csv").exists() and (tmp_path / "edges_r2.json").exists()
    assert main(["assortativity", "--edge-list", str(tmp_path / "edges_r0.csv"),
                 "--out", str(tmp_path)]) == 0
    r = json.loads((tmp_path / "assortativity.json").read_text())["assortativity"]
    g = grow(ModelParams(m=2, p=0.5, horizon=300), replica=0).state
    from paapa.stats import graph_assortativity
    assert r == pytest.approx(graph_assortativity(g))


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nm = 3\nT = 20\np = 0.5\n")
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "grow", "T=5", "--out", str(out)]) == 0
    meta = json.loads((out / "metadata.json").read_text())
    assert (meta["m"], meta["T"], meta["p"]) == (3, 5, 0.5)


def test_theory_commands(tmp_path):
    assert main(["theory", "exact-law", "m=1", "p=0", "t=3", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "exact_law.csv") == [["k", "prob"], ["1", "0.75"], ["2", "0.25"]]
    assert json.loads((tmp_path / "exact_law.json").read_text())["kind"] == "exact-law"
    assert main(["theory", "limit", "m=1", "p=1", "kmax=5", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "limit_law.csv")[1] == ["1", "0.5"]
    assert main(["theory", "expected-degree", "m=1", "p=0", "t=3", "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "expected_degree.csv")[-1] == ["3", "1.25"]


def test_error_reporting(tmp_path, capsys):
    rc = main(["theory", "exact-law", "variant=PA-APA-2", "--out", str(tmp_path)])
    err = capsys.readouterr().err.strip().splitlines()
    assert rc == 2 and len(err) == 1 and err[0].startswith("error code=NO_EXACT_LAW ")
    assert main(["grow", "p=2"]) == 2
    assert main(["grow", "--checkpoints", "5,3", "--out", str(tmp_path)]) == 2
    assert main(["bogus"]) == 2
    assert main(["assortativity", "--edge-list", str(tmp_path / "missing.csv")]) == 4
    assert main(["--config", str(tmp_path / "none.cfg"), "grow"]) == 4


def test_compare_verdicts(tmp_path):
    rc = main(["compare", "m=2", "p=1", "T=3000", "replicas=4", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "compare.json").read_text())
    assert rc == 0 and report["verdict"] == "PASS"
    rc = main(["compare", "m=2", "p=1", "T=100", "tolerance=1e-6", "--out", str(tmp_path)])
    assert rc == 3


def test_sweep_and_probdump(tmp_path):
    assert main(["sweep", "m=2", "T=200", "p-list=0,1", "replicas=2", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "assortativity.csv")
    assert rows[0] == ["p", "r_paapa2", "r_paapa"] and len(rows) == 3
    assert len(read_csv(tmp_path / "assortativity_replicas.csv")) == 1 + 2 * 2 * 2
    assert main(["probdump", "m=2", "p=0.5", "T=40", "--checkpoints", "10,40",
                 "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "probs_t40.csv")
    assert len(rows) == 41
    assert sum(float(r[2]) for r in rows[1:]) == pytest.approx(1.0)


def test_worker_count_does_not_change_results():
    prm = ModelParams(m=2, p=0.5, variant=Variant.PA_APA_2, horizon=400, seed=5, replicas=6)
    a = grow_replicas(prm, [100, 400], workers=1)
    b = grow_replicas(prm, [100, 400], workers=4)
    assert a.histograms[400].as_dict() == b.histograms[400].as_dict()
    assert np.array_equal(a.vertex_degrees, b.vertex_degrees)
    assert np.array_equal(final_degrees(prm, 3, 1), final_degrees(prm, 3, 3))
