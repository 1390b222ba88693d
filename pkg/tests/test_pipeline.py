import csv
import io
import json
import re

import pytest

from jra.bench import HEADER, bench, load_references
from jra.cli import main
from jra.exact import solve
from jra.instance import Instance, generate, save
from jra.pipeline import Reference, run_pipeline
from jra.render import render_svg
from jra.slppr import PolishConfig
from jra.tour import Tour, load as load_tour, tour_cost, validate


def test_small_instance_reaches_optimum():
    for seed in range(5):
        inst = generate(6, seed)
        # alpha = 1 lifts the retain row, so the last stage is a full solve
        t, rep = run_pipeline(inst, alpha=1.0)
        assert rep.complete
        validate(t, 6, True)
        assert rep.final_cost == pytest.approx(solve(inst).cost, abs=1e-9)


def test_stage_order_and_monotone():
    inst = generate(30, 7)
    ref = solve(inst)
    t, rep = run_pipeline(inst, PolishConfig(passes=2), reference=Reference(ref.cost, ref.tour))
    names = [s.name for s in rep.stages]
    assert names == ["merge", "ppr-merge", "polish1", "polish2", "large-alpha"]
    costs = [s.cost for s in rep.stages]
    assert all(b <= a + 1e-9 for a, b in zip(costs, costs[1:]))
    assert all(s.deviation_pct >= -1e-9 for s in rep.stages)
    assert rep.stages[-1].n_d is not None
    assert tour_cost(inst, t) == pytest.approx(rep.final_cost)
    d = json.loads(rep.dumps())
    assert d["config"]["effective_radius"] == 0.2


def test_without_ppr_merge():
    _, rep = run_pipeline(generate(12, 1), use_ppr_merge=False)
    assert rep.stage("ppr-merge") is None and rep.stage("merge") is not None


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_bench_header_and_empty_dir(tmp_path):
    text = bench(tmp_path)
    assert text == ",".join(HEADER) + "\r\n"
    assert HEADER[:3] == ["instance", "n", "L_ref"]
    assert HEADER[-2:] == ["N_d_large", "status"]
    assert len(HEADER) == 3 + 5 * 3 + 2


def test_bench_rows_and_average(tmp_path):
    for s in (2, 1):
        save(generate(8, s), tmp_path / f"i{s}.json")
    (tmp_path / "bad.json").write_text("{")
    refs = {"i1": solve(generate(8, 1)).cost, "i2.json": solve(generate(8, 2)).cost}
    rp = tmp_path / "ref.json"
    rp.write_text(json.dumps(refs))
    text = bench(tmp_path, PolishConfig(passes=1), references=load_references(rp))
    rows = _rows(text)
    assert [r[0] for r in rows[1:]] == ["bad.json", "i1.json", "i2.json", "ref.json", "average"]
    body = {r[0]: dict(zip(HEADER, r)) for r in rows[1:]}
    assert body["bad.json"]["status"].startswith("failed")
    assert body["ref.json"]["status"].startswith("failed")
    for name in ("i1.json", "i2.json"):
        assert re.fullmatch(r"\(\+\d+\.\d{3}%\)", body[name]["dev_large"])
        assert body[name]["status"] == "ok"
    assert body["average"]["status"] == "2 rows"
    want = (float(body["i1.json"]["L_merge"]) + float(body["i2.json"]["L_merge"])) / 2
    assert float(body["average"]["L_merge"]) == pytest.approx(want, abs=1e-6)
    again = _rows(bench(tmp_path, PolishConfig(passes=1), references=load_references(rp)))
    timeless = [k for k, h in enumerate(HEADER) if not h.startswith("t_")]
    assert [[r[k] for k in timeless] for r in again] == [[r[k] for k in timeless] for r in rows]


def test_svg_unit_square():
    inst = Instance([[0, 0], [1, 1]], [[1, 0], [0, 1]])
    svg = render_svg(inst, [Tour([1, 2], [3, 4])])
    assert svg.count('class="item"') == 2 and svg.count('class="placeholder"') == 2
    pts = re.search(r'<polyline[^>]*points="([^"]+)"', svg).group(1).split()
    assert len(pts) == 5 and pts[0] == pts[-1]
    assert render_svg(inst, [Tour([1, 2], [3, 4])]) == svg


def run_cli(*args):
    return main([str(a) for a in args])


def test_cli_roundtrip(tmp_path, capsys):
    inst_p = tmp_path / "inst.json"
    assert run_cli("generate", "--n", 10, "--seed", 3, "--out", inst_p) == 0
    a = inst_p.read_bytes()
    run_cli("generate", "--n", 10, "--seed", 3, "--out", inst_p)
    assert inst_p.read_bytes() == a
    tour_p = tmp_path / "t.json"
    assert run_cli("merge", inst_p, "--out", tour_p) == 0
    pol_p = tmp_path / "p.json"
    assert run_cli("polish", inst_p, "--tour", tour_p, "--passes", 1, "--out", pol_p,
                   "--stats", tmp_path / "s.json") == 0
    assert json.loads((tmp_path / "s.json").read_text())["circles"]
    assert run_cli("large-alpha", inst_p, "--tour", pol_p, "--alpha", 1.0,
                   "--out", tmp_path / "l.json") == 0
    exact_p = tmp_path / "e.json"
    assert run_cli("solve-exact", inst_p, "--out", exact_p) == 0
    inst = generate(10, 3)
    assert tour_cost(inst, load_tour(tmp_path / "l.json")) == pytest.approx(
        tour_cost(inst, load_tour(exact_p)), abs=1e-9)
    assert run_cli("render", inst_p, "--tour", exact_p, "--out", tmp_path / "x.svg") == 0
    assert run_cli("export-lp", inst_p, "--tour", exact_p, "--out", tmp_path / "m.lp") == 0
    assert "retain:" in (tmp_path / "m.lp").read_text()
    ref = tmp_path / "ref.json"
    ref.write_text(json.dumps({"inst": tour_cost(inst, load_tour(exact_p))}))
    assert run_cli("pipeline", inst_p, "--ref", ref, "--passes", 1, "--out",
                   tmp_path / "r.json", "--tour-out", tmp_path / "f.json") == 0
    rep = json.loads((tmp_path / "r.json").read_text())
    assert rep["stages"][-1]["deviation_pct"] == pytest.approx(0.0, abs=1e-9)
    assert run_cli("ppr-merge", inst_p, "--out", tmp_path / "pm.json") == 0
    assert run_cli("bench", tmp_path / "nothing") == 2
    assert run_cli("analyze-kopt", "--kmax", 5, "--n", 10, "--alpha", 0.5) == 0
    out = capsys.readouterr().out
    assert "5,384" in out and "N_total=" in out


def test_cli_input_errors(tmp_path):
    assert run_cli("solve-exact", tmp_path / "missing.json") == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"items": [[0, 0]]}')
    assert run_cli("merge", bad) == 2
    inst_p = tmp_path / "i.json"
    save(generate(5, 0), inst_p)
    wrong = tmp_path / "t.json"
    wrong.write_text(json.dumps({"q_I": [1, 2], "q_P": [3, 4]}))
    assert run_cli("polish", inst_p, "--tour", wrong) == 2
    assert run_cli("polish", inst_p, "--radius", -1) == 2
    assert run_cli("generate") == 2


def test_cli_time_limit_exit(tmp_path):
    code = run_cli("solve-exact", "--n", 45, "--seed", 5, "--time-limit", 0,
                   "--out", tmp_path / "t.json")
    assert code in (0, 3)
    if code == 3:
        validate(load_tour(tmp_path / "t.json"), 45, True)
