from .config import ExperimentConfig, load_config
from .environment import build_environment, render_summary
from .experiments import (Experiment, ExperimentRegistry, Outcome, register_experiment,
                          resolve_geometries)
from .plotdata import emit_plot_data, plot_rows
from .records import (RecordWriter, ResultRecord, canonical_json, read_manifest, read_records,
                      records_in)
from .runner import ExperimentRunner, RunResult, run_experiment

__all__ = [
    "ExperimentConfig",
    "load_config",
    "build_environment",
    "render_summary",
    "Experiment",
    "ExperimentRegistry",
    "Outcome",
    "register_experiment",
    "resolve_geometries",
    "emit_plot_data",
    "plot_rows",
    "RecordWriter",
    "ResultRecord",
    "canonical_json",
    "read_manifest",
    "read_records",
    "records_in",
    "ExperimentRunner",
    "RunResult",
    "run_experiment",
]
