from metarep.experiments.config import ExperimentConfig, parse_config, parse_config_text
from metarep.experiments.results import (
    TrialResult,
    read_trials,
    summarize,
    summary_csv,
    trials_csv,
    write_results,
)
from metarep.experiments.runner import run_experiment, run_trial
