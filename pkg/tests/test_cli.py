import json
import subprocess
import sys

import pytest

from cutbounds.cli import main
from cutbounds.formats import read_edgelist
from cutbounds.generators import sample
from cutbounds.graph_core import RoleAssignment
from cutbounds.mincut import st_capacity
from cutbounds.models import SWS
from cutbounds.seeding import derive_seed

FOUR_CYCLE = "n=4\n0 1 1\n1 2 1\n2 3 1\n0 3 1\n"
EDGELESS = "n=5\n"
K5 = "n=5\n" + "".join(f"{i} {j} 1\n" for i in range(5) for j in range(i + 1, 5))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def manifest_line(out):
    lines = [line for line in out.splitlines() if line.startswith("manifest: ")]
    assert lines
    return json.loads(lines[-1][len("manifest: ") :])


class TestGenerate:
    def test_sws(self, tmp_path, capsys):
        out = tmp_path / "g.edges"
        code, text, _ = run(capsys, "generate", "sws", "--n", 200, "--k", 8, "--p", 0.2, "--seed", 7, "--out", out)
        assert code == 0
        g = read_edgelist(out)
        assert g.n == 200 and g.m >= 800
        man = manifest_line(text)
        assert man["seed"] == 7 and man["params"]["k"] == 8
        assert json.loads((tmp_path / "g.edges.manifest.json").read_text()) == man

    def test_drn_sidecar(self, tmp_path, capsys):
        out = tmp_path / "d.edges"
        code, _, _ = run(capsys, "generate", "drn", "--n", 30, "--p", 0.5, "--rs", 0.1, "--rl", 0.3, "--seed", 1, "--out", out)
        assert code == 0
        assert len((tmp_path / "d.edges.nodes").read_text().splitlines()) == 30

    def test_odd_k(self, tmp_path, capsys):
        code, _, err = run(capsys, "generate", "swr", "--n", 20, "--k", 5, "--p", 0.2, "--out", tmp_path / "x")
        assert code == 1 and "k must be even" in err

    def test_torus_range(self, tmp_path, capsys):
        args = ("generate", "drn", "--metric", "torus", "--n", 20, "--p", 0.5, "--rs", 0.1, "--rl", 0.6, "--out", tmp_path / "x")
        code, _, err = run(capsys, *args)
        assert code == 1 and "1/sqrt(pi)" in err

    def test_seed_is_drawn_and_echoed(self, tmp_path, capsys):
        code, text, _ = run(capsys, "generate", "sws", "--n", 20, "--k", 4, "--p", 0.2, "--out", tmp_path / "g")
        assert code == 0
        assert isinstance(manifest_line(text)["seed"], int)

    def test_round_trip_matches_in_process(self, tmp_path, capsys):
        out = tmp_path / "g.edges"
        run(capsys, "generate", "sws", "--n", 40, "--k", 4, "--p", 0.3, "--seed", 5, "--out", out)
        code, text, _ = run(capsys, "capacity", out, "--s", 0, "--t", 20)
        assert code == 0
        want = st_capacity(sample(SWS(40, 4, 0.3), 5), RoleAssignment(40, 0, (20,)), 20)
        assert f"capacity {int(want.value)}" in text
        assert "witness " + " ".join(map(str, want.witness.sorted_members())) in text


class TestCapacity:
    @pytest.mark.parametrize(
        "text,t,want",
        [(FOUR_CYCLE, 2, 2), (EDGELESS, 4, 0), (K5, 4, 3)],
        ids=["four-cycle", "edgeless", "k5"],
    )
    def test_fixtures(self, tmp_path, capsys, text, t, want):
        path = tmp_path / "f.edges"
        path.write_text(text)
        code, out, _ = run(capsys, "capacity", path, "--s", 0, "--t", t, "--mode", "paper")
        assert code == 0
        assert out.splitlines()[0] == f"capacity {want}"

    def test_graph_mode(self, tmp_path, capsys):
        path = tmp_path / "k5.edges"
        path.write_text(K5)
        _, out, _ = run(capsys, "capacity", path, "--s", 0, "--t", 4, "--mode", "graph")
        assert out.splitlines()[0] == "capacity 4"

    def test_terminal_set(self, tmp_path, capsys):
        path = tmp_path / "c.edges"
        path.write_text(FOUR_CYCLE)
        code, out, _ = run(capsys, "capacity", path, "--s", 0, "--terminals", "1,2")
        assert code == 0 and "capacity" in out

    def test_malformed_file(self, tmp_path, capsys):
        path = tmp_path / "bad.edges"
        path.write_text("0 1\n")
        code, _, _ = run(capsys, "capacity", path, "--s", 0, "--t", 1)
        assert code == 1

    def test_role_conflict(self, tmp_path, capsys):
        path = tmp_path / "c.edges"
        path.write_text(FOUR_CYCLE)
        code, _, _ = run(capsys, "capacity", path, "--s", 2, "--t", 2)
        assert code == 1


class TestBounds:
    def test_json(self, capsys):
        code, out, _ = run(capsys, "bounds", "sws", "--n", 200, "--k", 8, "--p", 0.2, "--d", 1.2)
        assert code == 0
        row = json.loads(out)
        assert row["c_min"] == pytest.approx(46.2)
        assert row["epsilon"] == pytest.approx(0.89513, abs=5e-6)
        assert row["d_valid"] is True

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "bounds", "swr", "--n", 200, "--k", 8, "--p", 0.5, "--csv")
        assert code == 0
        header, row = out.strip().splitlines()
        assert dict(zip(header.split(","), row.split(",")))["c_min"] == "8.0"

    def test_invalid_d_is_reported(self, capsys):
        code, out, _ = run(capsys, "bounds", "drn", "--n", 100, "--p", 0.5, "--rs", 0.1, "--rl", 0.3, "--d", 1.0)
        assert code == 0
        row = json.loads(out)
        assert row["d_valid"] is False and row["lower_prob_bound"] == "inf"

    def test_square_drn(self, capsys):
        args = ("bounds", "drn", "--metric", "square", "--n", 100, "--p", 0.5, "--rs", 0.1, "--rl", 0.3, "--d", 1.0)
        row = json.loads(run(capsys, *args)[1])
        assert row["mu_prime"] == row["mu"] / 4
        assert row["epsilon_prime"] == 4 * row["epsilon"]

    def test_missing_model(self, capsys):
        assert run(capsys, "bounds", "--n", 10)[0] == 1


class TestExperiment:
    def test_outputs(self, tmp_path, capsys):
        prefix = tmp_path / "run"
        code, out, _ = run(capsys, "experiment", "sws", "--n", 40, "--k", 4, "--p", 0.3, "--trials", 10, "--seed", 3, "--out", prefix)
        assert code == 0
        assert "trials 10 seed 3" in out
        data = json.loads((tmp_path / "run.json").read_text())
        assert data["manifest"]["seed"] == 3 and len(data["capacities"]) == 10
        assert (tmp_path / "run.csv").read_text().startswith("model,")
        assert json.loads((tmp_path / "run.manifest.json").read_text())["files"]

    def test_same_seed_same_capacities(self, tmp_path, capsys):
        caps = []
        for name, workers in (("a", 1), ("b", 2)):
            prefix = tmp_path / name
            run(capsys, "experiment", "swr", "--n", 40, "--k", 4, "--p", 0.3, "--trials", 8, "--seed", 9, "--workers", workers, "--out", prefix)
            caps.append(json.loads((tmp_path / f"{name}.json").read_text())["capacities"])
        assert caps[0] == caps[1]

    def test_assert_bounds_on_complete_graph(self, tmp_path, capsys):
        args = ("experiment", "sws", "--n", 30, "--k", 4, "--p", 1.0, "--trials", 5, "--seed", 1, "--assert-bounds", "--out", tmp_path / "r")
        assert run(capsys, *args)[0] == 0

    def test_assert_bounds_fails_when_exceeded(self, tmp_path, capsys):
        # complete graph with 20 terminals: paper mode leaves 9 relays, far
        # below the lower threshold, while the lower bound is about 0.09
        args = ("experiment", "sws", "--n", 30, "--k", 4, "--p", 1.0, "--alpha", 20, "--d", 1.1, "--trials", 5, "--seed", 1, "--assert-bounds", "--out", tmp_path / "r")
        code, out, err = run(capsys, *args)
        assert "lower_violations 5" in out
        assert code == 2 and "exceeds" in err

    def test_violations_are_a_report_without_flag(self, tmp_path, capsys):
        args = ("experiment", "sws", "--n", 30, "--k", 4, "--p", 1.0, "--alpha", 20, "--d", 1.1, "--trials", 5, "--seed", 1, "--out", tmp_path / "r")
        code, out, _ = run(capsys, *args)
        assert code == 0 and "lower_violations 5" in out

    def test_budget_refusal(self, tmp_path, capsys):
        args = ("experiment", "sws", "--n", 200, "--k", 8, "--p", 0.2, "--trials", 100, "--budget", 1000, "--out", tmp_path / "r")
        code, _, err = run(capsys, *args)
        assert code == 3 and "budget" in err

    def test_config_file_overlay(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# concentration run\nmodel = sws\nn = 40\nk = 4\np = 0.3\ntrials = 50\nseed = 4\n")
        code, out, _ = run(capsys, "experiment", "--config", cfg, "--trials", 6, "--out", tmp_path / "r")
        assert code == 0
        assert "trials 6 seed 4" in out

    def test_bad_config_line(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("model sws\n")
        assert run(capsys, "experiment", "--config", cfg)[0] == 1


class TestSweep:
    def test_grid(self, tmp_path, capsys):
        prefix = tmp_path / "sw"
        code, out, _ = run(capsys, "sweep", "sws", "--n", "20,40", "--k", 4, "--p", "0.2,0.5", "--trials", 3, "--seed", 2, "--out", prefix)
        assert code == 0
        assert len([line for line in out.splitlines() if line.startswith("point ")]) == 4
        assert len((tmp_path / "sw.csv").read_text().splitlines()) == 5
        assert len(json.loads((tmp_path / "sw.json").read_text())["points"]) == 4

    def test_empty_grid(self, tmp_path, capsys):
        code, _, err = run(capsys, "sweep", "sws", "--n", ",", "--k", 4, "--p", 0.2, "--out", tmp_path / "x")
        assert code == 1 and "usage" in err


class TestUsage:
    def test_no_command(self, capsys):
        assert run(capsys)[0] == 1

    def test_unknown_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["bounds", "sws", "--bogus"])
        assert exc.value.code == 1

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "cutbounds", "bounds", "swr", "--n", "100", "--k", "4", "--p", "0.5"],
            capture_output=True,
            text=True,
            check=False,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["c_min"] == 4.0


def test_seed_derivation_is_stable():
    # pinned so that saved seeds keep replaying the same graphs across releases
    a = derive_seed(123, "trial", 4).generate_state(2)
    b = derive_seed(123, "trial", 4).generate_state(2)
    assert a.tolist() == b.tolist()
    assert derive_seed(123, "trial", 5).generate_state(2).tolist() != a.tolist()
