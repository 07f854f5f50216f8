"""Command-line surface: exit codes, JSON reports, branch listings."""

import json

from lpcckit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_sets_check_family(capsys):
    code, out = run(capsys, "sets", "check", "--name", "S1m", "--m", "4")
    assert code == 0
    assert "ok" in out


def test_sets_check_json_roundtrip(capsys):
    code, out = run(capsys, "--json", "sets", "export", "--name", "S2")
    assert code == 0
    data = json.loads(out)
    from lpcckit.statesets import StateSet, build_named_set
    back = StateSet.from_json(data["verdicts"][0])
    assert back.labels() == build_named_set("S2").labels()


def test_measure_apply_matches_published_branch(capsys):
    code, out = run(capsys, "--json", "measure", "apply", "--name", "S1",
                    "--group", "B", "--pvm", "0;1")
    assert code == 0
    data = json.loads(out)
    outcomes = [v for v in data["verdicts"] if "outcome" in v]
    assert len(outcomes) == 2
    assert all(len(v["states"]) == 9 for v in outcomes)


def test_solve_rank1_exit_codes(capsys):
    code, out = run(capsys, "solve", "rank1", "--name", "S2", "--group", "A",
                    "--exact-only")
    assert code == 0
    assert "no preserving rank-1 direction" in out
    code, out = run(capsys, "solve", "rank1", "--name", "S2", "--group", "C")
    assert code == 0
    assert out.count("direction:") == 3


def test_protocol_fixture(capsys):
    code, out = run(capsys, "protocol", "--fixture", "s1_discrimination")
    assert code == 0
    assert "verified" in out


def test_search_exit_unknown_on_depth(capsys):
    code, _ = run(capsys, "search", "--name", "Domino", "--depth", "1")
    assert code == 0          # indistinguishable is a confirmed verdict


def test_activate_confirmed(capsys):
    code, out = run(capsys, "activate", "--name", "S1", "--group", "B",
                    "--pvm", "0;1")
    assert code == 0
    assert "activation asserted: True" in out


def test_activate_refuted(capsys):
    code, out = run(capsys, "activate", "--name", "S2", "--group", "C",
                    "--pvm", "0-1;~")
    assert code == 1


def test_theorem_exit_code(capsys):
    code, out = run(capsys, "theorem", "3")
    assert code == 0
    assert "confirmed" in out


def test_diagram_ascii(capsys):
    code, out = run(capsys, "diagram", "--name", "S2", "--partition", "A|BC")
    assert code == 0
    assert "rows" in out and "+" in out


def test_diagram_domino_grid(capsys):
    code, out = run(capsys, "diagram", "--name", "Domino")
    assert code == 0
    assert out.count("+---+") >= 3


def test_diagram_svg(capsys):
    code, out = run(capsys, "--json", "diagram", "--name", "Domino",
                    "--format", "svg")
    assert code == 0


def test_usage_error():
    assert main(["sets", "check", "--name", "NotASet"]) == 64


def test_invalid_m():
    assert main(["sets", "check", "--name", "S1m"]) == 64


def test_all_theorem_replays_green_and_timely(capsys):
    import time
    t0 = time.time()
    for n in range(1, 6):
        assert main(["theorem", str(n)]) == 0
    assert main(["lemma", "1", "--samples", "40"]) == 0
    capsys.readouterr()
    assert time.time() - t0 < 300.0
