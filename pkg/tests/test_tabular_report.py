from pathlib import Path

from gchr.envs import load_tabular_mdp
from gchr.tabular_lab import format_report, make_gridworld, verify_tabular, write_report_csv

ASSETS = Path(__file__).resolve().parent.parent / "assets"


def test_chain_fixture_passes_all_checks():
    mdp = load_tabular_mdp(ASSETS / "chain3.mdp")
    results = verify_tabular(mdp, seed=0)
    assert all(r.passed for r in results), format_report(results)


def test_gridworld_passes_all_checks():
    mdp = make_gridworld(3, 3, gamma=0.95, slip=0.1)
    results = verify_tabular(mdp, seed=1, pi_sweeps=3)
    assert all(r.passed for r in results), format_report(results)


def test_report_formats_one_line_per_check(tmp_path):
    mdp = load_tabular_mdp(ASSETS / "chain3.mdp")
    results = verify_tabular(mdp, seed=0)
    text = format_report(results)
    lines = text.splitlines()
    assert len(lines) == len(results) + 1  # one per check plus the summary
    assert all(line.startswith(("PASS", "FAIL")) for line in lines[:-1])
    csv_path = tmp_path / "report.csv"
    write_report_csv(results, csv_path)
    rows = csv_path.read_text().strip().splitlines()
    assert len(rows) == len(results) + 1
    assert rows[0].startswith("check,passed,margin")
