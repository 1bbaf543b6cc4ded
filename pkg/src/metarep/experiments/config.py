"""Experiment configuration: a flat ``key = value`` text format.

Lines are ``key = value``; ``#`` starts a comment; lists are comma separated.
Unknown or repeated keys are rejected. Example::

    d = 100
    r = 5
    sweep_var = num_tasks
    sweep_values = 5, 10, 20, 40
    fixed_n_per_task = 25
    n2 = 25
    master_seed = 7
"""

from dataclasses import asdict, dataclass, fields
from pathlib import Path

from metarep.errors import ConfigError

SWEEP_VARS = ("num_tasks", "n_per_task")
ESTIMATORS = ("mom", "fo")
REQUIRED = ("d", "r", "sweep_var", "sweep_values", "n2", "master_seed")
# Fixed dimension used when the config leaves it out: n_t = 25 and t = 20.
DEFAULT_FIXED = {"fixed_n_per_task": 25, "fixed_t": 20}


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    r: int
    sweep_var: str
    sweep_values: tuple
    n2: int
    master_seed: int
    fixed_t: int | None = None
    fixed_n_per_task: int | None = None
    estimators: tuple = ESTIMATORS
    sampling: str = "round_robin"
    reps: int = 30
    noise: float = 1.0
    out_dir: str = "results"
    max_iters: int = 2000
    grad_tol: float = 1e-8
    c0: float = 10.0

    def dims(self, sweep_value):
        """``(t, n_per_task)`` at one sweep point."""
        if self.sweep_var == "num_tasks":
            return sweep_value, self.fixed_n_per_task
        return self.fixed_t, sweep_value

    def to_text(self):
        lines = []
        for key, value in asdict(self).items():
            if value is None:
                continue
            if isinstance(value, (tuple, list)):
                value = ", ".join(str(v) for v in value)
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name for f in fields(ExperimentConfig)}


def _int(key, raw, line, minimum=None):
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"expected an integer, got {raw!r}", key, line) from None
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", key, line)
    return value


def _float(key, raw, line):
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"expected a number, got {raw!r}", key, line) from None


def _list(raw):
    return [item.strip() for item in raw.split(",") if item.strip()]


def parse_config_text(text):
    raw = {}
    where = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError("unknown key", key, lineno)
        if key in raw:
            raise ConfigError("repeated key", key, lineno)
        raw[key] = value
        where[key] = lineno

    for key in REQUIRED:
        if key not in raw:
            raise ConfigError("missing required key", key)

    def line(key):
        return where.get(key)

    out = {}
    for key in ("d", "r", "n2", "reps", "max_iters", "fixed_t", "fixed_n_per_task"):
        if key in raw:
            out[key] = _int(key, raw[key], line(key), minimum=1)
    out["master_seed"] = _int("master_seed", raw["master_seed"], line("master_seed"), minimum=0)
    for key in ("grad_tol", "c0", "noise"):
        if key in raw:
            out[key] = _float(key, raw[key], line(key))
    if "out_dir" in raw:
        out["out_dir"] = raw["out_dir"]

    if out["r"] > out["d"]:
        raise ConfigError(f"r={out['r']} exceeds d={out['d']}", "r", line("r"))
    if out.get("noise", 1.0) != 1.0:
        raise ConfigError("noise level is fixed at 1", "noise", line("noise"))
    for key in ("grad_tol", "c0"):
        if key in out and not out[key] > 0:
            raise ConfigError("must be positive", key, line(key))

    sweep_var = raw["sweep_var"]
    if sweep_var not in SWEEP_VARS:
        raise ConfigError(f"must be one of {', '.join(SWEEP_VARS)}", "sweep_var", line("sweep_var"))
    out["sweep_var"] = sweep_var
    values = [_int("sweep_values", v, line("sweep_values"), minimum=1) for v in _list(raw["sweep_values"])]
    if not values:
        raise ConfigError("must not be empty", "sweep_values", line("sweep_values"))
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("must be strictly increasing", "sweep_values", line("sweep_values"))
    out["sweep_values"] = tuple(values)

    fixed_key = "fixed_n_per_task" if sweep_var == "num_tasks" else "fixed_t"
    other_key = "fixed_t" if sweep_var == "num_tasks" else "fixed_n_per_task"
    if other_key in out:
        raise ConfigError(f"not used when sweep_var = {sweep_var}", other_key, line(other_key))
    out.setdefault(fixed_key, DEFAULT_FIXED[fixed_key])

    if "estimators" in raw:
        ests = _list(raw["estimators"])
        bad = [e for e in ests if e not in ESTIMATORS]
        if not ests or bad or len(set(ests)) != len(ests):
            raise ConfigError(f"must be a non-empty subset of {', '.join(ESTIMATORS)}",
                              "estimators", line("estimators"))
        out["estimators"] = tuple(e for e in ESTIMATORS if e in ests)
    if "sampling" in raw:
        if raw["sampling"] not in ("round_robin", "uniform"):
            raise ConfigError("must be round_robin or uniform", "sampling", line("sampling"))
        out["sampling"] = raw["sampling"]
    return ExperimentConfig(**out)


def parse_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ConfigError(f"{path} is not valid UTF-8") from None
    return parse_config_text(text)
