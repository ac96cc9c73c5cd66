"""Terminal-goal extraction from trajectory dumps (goal-coverage analysis)."""

from __future__ import annotations

import csv
from pathlib import Path


def dump_terminal_goals(run_dir, out_path=None):
    """One row per training episode: seed, episode, terminal achieved goal,
    desired goal.

    Requires the run to have been trained with dump_trajectories enabled;
    reports which seed directories lack dumps otherwise.
    """
    run_dir = Path(run_dir)
    seed_dirs = sorted(run_dir.glob("seed_*"))
    if not seed_dirs:
        raise FileNotFoundError(f"no seed directories under {run_dir}")
    missing = [d.name for d in seed_dirs if not (d / "trajectories.csv").exists()]
    if missing:
        raise FileNotFoundError(
            f"missing trajectory dumps in {missing}; rerun with run.dump_trajectories=true"
        )
    out_path = Path(out_path) if out_path else run_dir / "terminal_goals.csv"
    rows = []
    header_out = None
    for seed_dir in seed_dirs:
        seed = seed_dir.name.removeprefix("seed_")
        with open(seed_dir / "trajectories.csv", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            achieved_cols = [i for i, name in enumerate(header) if name.startswith("achieved_")]
            desired_cols = [i for i, name in enumerate(header) if name.startswith("desired_")]
            if header_out is None:
                header_out = (
                    ["seed", "episode"]
                    + [header[i] for i in achieved_cols]
                    + [header[i] for i in desired_cols]
                )
            last_by_episode = {}
            for row in reader:
                last_by_episode[int(row[0])] = row
            for episode in sorted(last_by_episode):
                row = last_by_episode[episode]
                rows.append(
                    [seed, episode]
                    + [row[i] for i in achieved_cols]
                    + [row[i] for i in desired_cols]
                )
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header_out)
        writer.writerows(rows)
    return out_path
