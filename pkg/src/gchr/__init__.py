"""Goal-conditioned RL with hindsight experience replay and hindsight
regularization (GCHR), plus an exact tabular verification lab."""

__version__ = "0.1.0"
