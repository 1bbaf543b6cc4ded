"""Trial records and their CSV files."""

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

TRIAL_COLUMNS = (
    "estimator", "sweep_var", "sweep_value", "rep", "seed", "sin_theta",
    "transfer_error_sq", "baseline_error_sq", "optimizer_iters",
    "in_constraint_set", "wall_millis",
)
SUMMARY_COLUMNS = ("estimator", "sweep_value", "metric", "mean", "std", "reps")
SUMMARY_METRICS = ("sin_theta", "transfer_error_sq", "baseline_error_sq", "optimizer_iters")


@dataclass(frozen=True)
class TrialResult:
    estimator: str
    sweep_var: str
    sweep_value: int
    rep: int
    seed: int
    sin_theta: float | None
    transfer_error_sq: float | None
    baseline_error_sq: float | None
    optimizer_iters: int | None = None
    in_constraint_set: bool | None = None
    wall_millis: float | None = None
    error: str | None = None  # set on failed trials, not written to CSV

    @property
    def failed(self):
        return self.error is not None

    def sort_key(self):
        return (self.estimator, self.sweep_value, self.rep)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trials_csv(results):
    rows = sorted(results, key=TrialResult.sort_key)
    return _csv_text(TRIAL_COLUMNS, ([getattr(t, c) for c in TRIAL_COLUMNS] for t in rows))


def summarize(results):
    """Mean and population standard deviation of each metric per (estimator, sweep_value).

    Failed or absent values are skipped; ``reps`` counts the values used.
    """
    groups = {}
    for t in sorted(results, key=TrialResult.sort_key):
        groups.setdefault((t.estimator, t.sweep_value), []).append(t)
    rows = []
    for (est, value), trials in groups.items():
        for metric in SUMMARY_METRICS:
            xs = [float(getattr(t, metric)) for t in trials if getattr(t, metric) is not None]
            if not xs:
                continue
            mean = math.fsum(xs) / len(xs)
            std = math.sqrt(math.fsum((x - mean) ** 2 for x in xs) / len(xs))
            rows.append((est, value, metric, mean, std, len(xs)))
    return rows


def summary_csv(results):
    return _csv_text(SUMMARY_COLUMNS, summarize(results))


def _atomic_write(path, text):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_results(results, out_dir):
    """Write ``trials.csv`` and ``summary.csv`` into `out_dir`, replacing atomically.

    Returns the two paths. Filesystem failures surface as ``OSError`` carrying
    the offending path.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trials_path = out / "trials.csv"
    summary_path = out / "summary.csv"
    _atomic_write(trials_path, trials_csv(results))
    _atomic_write(summary_path, summary_csv(results))
    return trials_path, summary_path


def _parse_optional(raw, kind):
    if raw == "":
        return None
    if kind is bool:
        if raw not in ("true", "false"):
            raise ValueError(f"bad boolean {raw!r}")
        return raw == "true"
    return kind(raw)


def read_trials(path_or_text):
    """Parse a trials CSV (a path, or the CSV text itself) back into TrialResults."""
    if isinstance(path_or_text, Path) or "\n" not in str(path_or_text):
        text = Path(path_or_text).read_text(encoding="utf-8")
    else:
        text = path_or_text
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != TRIAL_COLUMNS:
        raise ValueError(f"unexpected trials.csv header: {reader.fieldnames}")
    out = []
    for row in reader:
        sin = _parse_optional(row["sin_theta"], float)
        out.append(TrialResult(
            estimator=row["estimator"],
            sweep_var=row["sweep_var"],
            sweep_value=int(row["sweep_value"]),
            rep=int(row["rep"]),
            seed=int(row["seed"]),
            sin_theta=sin,
            transfer_error_sq=_parse_optional(row["transfer_error_sq"], float),
            baseline_error_sq=_parse_optional(row["baseline_error_sq"], float),
            optimizer_iters=_parse_optional(row["optimizer_iters"], int),
            in_constraint_set=_parse_optional(row["in_constraint_set"], bool),
            wall_millis=_parse_optional(row["wall_millis"], float),
            error=None if sin is not None else "failed",
        ))
    return out
