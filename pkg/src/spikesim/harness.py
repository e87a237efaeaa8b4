"""Experiment configuration, batch runs, benchmarking and file output.

Configuration documents are flat ``key = value`` text split into sections::

    # comments start with '#'
    repeat = 5

    [model]
    kind = quadratic-izhikevich
    coefficients = 0.04, 5, 140
    a = 0.02

    [current]
    kind = constant
    value = 7.6

    [init]
    v = -59.9

    [solver]
    scheme = hybrid-adaptive
    epsilon = 0.01

    [outputs]
    spikes_path = spikes.csv

Every key is optional. Missing model, current and solver keys take the
values of the shipped ``izhikevich_burst`` experiment and the
:class:`SolverConfig` defaults; the initial state defaults to ``(0, c, b c)``.
Keys before the first section are ``name``, ``seed`` and ``repeat``.
"""

import csv
import json
import math
import os
import statistics
import time
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

from .error_analysis import measure_empirical_error
from .exceptions import ConfigError, DataError, SpikeSimError
from .integrators import SimState, SolverConfig, simulate
from .models import InputCurrent, ModelSpec
from .spiketrain import classify_pattern, default_transient_skip, reset_sequence

OUTPUT_DIR_ENV = "SPIKESIM_OUTPUT_DIR"

TRAJECTORY_COLUMNS = ("t", "v", "w", "branch")
SPIKE_COLUMNS = ("index", "spike_time", "w_at_spike")
SWEEP_COLUMNS = ("theta", "tau", "spike_time_error", "w_error")
COMPARISON_COLUMNS = (
    "scheme",
    "tau_or_eps",
    "step_count",
    "wall_time_median",
    "spike_count",
    "first_spike_time",
    "first_spike_w",
    "pattern",
    "first_spike_time_delta",
    "first_spike_w_delta",
)

_MODEL_DEFAULTS = {
    "kind": "quadratic-izhikevich",
    "coefficients": (0.04, 5.0, 140.0),
    "a": 0.02,
    "b": 0.19,
    "c": -59.9,
    "d": 1.15,
}
_CURRENT_KEYS = {"kind", "value", "jumps", "values", "base", "onsets", "amplitudes"}
_INIT_KEYS = {"t", "v", "w"}
_OUTPUT_KEYS = {"trajectory_path", "spikes_path", "report_path"}
_TOP_KEYS = {"name", "seed", "repeat"}
_SOLVER_KEYS = {f.name for f in fields(SolverConfig)}
_INT_SOLVER_KEYS = {"record_every", "max_events", "max_floored_steps"}
_STR_SOLVER_KEYS = {"scheme", "spike_interp"}
_SECTIONS = ("model", "current", "init", "solver", "outputs")


@dataclass(frozen=True)
class Outputs:
    trajectory_path: str = None
    spikes_path: str = None
    report_path: str = None

    def __post_init__(self):
        given = [p for p in (self.trajectory_path, self.spikes_path, self.report_path) if p]
        if len(set(given)) != len(given):
            raise ValueError("output paths must be distinct")


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec = field(default_factory=lambda: ModelSpec.izhikevich())
    current: InputCurrent = field(default_factory=lambda: InputCurrent.constant(7.6))
    init: SimState = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    outputs: Outputs = field(default_factory=Outputs)
    seed: int = 0
    repeat: int = 5
    name: str = "experiment"

    def __post_init__(self):
        if self.init is None:
            object.__setattr__(self, "init", SimState(0.0, self.model.c, self.model.b * self.model.c))
        if self.repeat < 1:
            raise ValueError("repeat must be at least 1")
        self.solver.check_model(self.model)

    def replace(self, **changes):
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ExperimentConfig(**values)

    def with_solver(self, **changes):
        return self.replace(solver=self.solver.replace(**changes))

    def echo(self):
        """Plain-data view of the config for reports."""
        return {
            "name": self.name,
            "seed": self.seed,
            "repeat": self.repeat,
            "model": asdict(self.model),
            "current": asdict(self.current),
            "init": asdict(self.init),
            "solver": asdict(self.solver),
            "outputs": asdict(self.outputs),
        }


def _number(text, line, key, integer=False):
    try:
        value = int(text) if integer else float(text)
    except ValueError:
        kind = "an integer" if integer else "a number"
        raise ConfigError(f"expected {kind}, got {text!r}", line, key) from None
    return value


def _numbers(text, line, key):
    if not text.strip():
        return ()
    return tuple(_number(part.strip(), line, key) for part in text.split(","))


def _tokenize(text):
    """Yield ``(section, key, value, line)`` for every assignment in ``text``."""
    section = None
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"malformed section header {line!r}", lineno)
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ConfigError(f"unknown section [{section}]", lineno)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key", lineno)
        if (section, key) in seen:
            raise ConfigError(f"duplicate key (first set on line {seen[section, key]})", lineno, key)
        seen[section, key] = lineno
        yield section, key, value, lineno


def _build_model(entries):
    kwargs = dict(_MODEL_DEFAULTS)
    lines = {}
    for key, (value, line) in entries.items():
        lines[key] = line
        if key == "kind":
            kwargs["kind"] = value
            if value != _MODEL_DEFAULTS["kind"] and "coefficients" not in entries:
                kwargs["coefficients"] = ()
        elif key == "coefficients":
            kwargs["coefficients"] = _numbers(value, line, key)
        elif key in ("a", "b", "c", "d"):
            kwargs[key] = _number(value, line, key)
        else:
            raise ConfigError("unknown key in [model]", line, key)
    try:
        return ModelSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), _blame(str(exc), lines), _blame_key(str(exc), lines)) from None


def _build_current(entries):
    lines = {key: line for key, (_, line) in entries.items()}
    for key, line in lines.items():
        if key not in _CURRENT_KEYS:
            raise ConfigError("unknown key in [current]", line, key)
    kind = entries.get("kind", ("constant", None))[0]

    def get(key, parse, default=None):
        if key in entries:
            value, line = entries[key]
            return parse(value, line, key)
        return default

    allowed = {
        "constant": {"kind", "value"},
        "piecewise-constant": {"kind", "jumps", "values"},
        "sum-of-steps": {"kind", "base", "onsets", "amplitudes"},
    }
    if kind not in allowed:
        raise ConfigError(f"unknown current kind {kind!r}", lines.get("kind"), "kind")
    for key, line in lines.items():
        if key not in allowed[kind]:
            raise ConfigError(f"key does not apply to a {kind} current", line, key)
    try:
        if kind == "constant":
            return InputCurrent.constant(get("value", _number, 7.6))
        if kind == "piecewise-constant":
            return InputCurrent.piecewise(get("jumps", _numbers, ()), get("values", _numbers, (0.0,)))
        return InputCurrent.steps(
            get("base", _number, 0.0), get("onsets", _numbers, ()), get("amplitudes", _numbers, ())
        )
    except ValueError as exc:
        raise ConfigError(str(exc), min(lines.values(), default=None)) from None


def _build_solver(entries):
    kwargs, lines = {}, {}
    for key, (value, line) in entries.items():
        lines[key] = line
        if key not in _SOLVER_KEYS:
            raise ConfigError("unknown key in [solver]", line, key)
        if key in _STR_SOLVER_KEYS:
            kwargs[key] = value
        else:
            kwargs[key] = _number(value, line, key, integer=key in _INT_SOLVER_KEYS)
    try:
        return SolverConfig(**kwargs), lines
    except ValueError as exc:
        raise ConfigError(str(exc), _blame(str(exc), lines), _blame_key(str(exc), lines)) from None


def _blame_key(message, lines):
    for key in sorted(lines, key=len, reverse=True):
        if key in message:
            return key
    return None


def _blame(message, lines):
    key = _blame_key(message, lines)
    return lines.get(key) if key else None


def parse_config(text, name="experiment"):
    """Parse and validate a configuration document into an :class:`ExperimentConfig`."""
    groups = {s: {} for s in (None,) + _SECTIONS}
    for section, key, value, line in _tokenize(text):
        groups[section][key] = (value, line)

    top = {}
    for key, (value, line) in groups[None].items():
        if key not in _TOP_KEYS:
            raise ConfigError("unknown top-level key", line, key)
        top[key] = value if key == "name" else _number(value, line, key, integer=True)

    model = _build_model(groups["model"])
    current = _build_current(groups["current"])
    solver, solver_lines = _build_solver(groups["solver"])

    init_kwargs = {"t": 0.0, "v": model.c, "w": None}
    for key, (value, line) in groups["init"].items():
        if key not in _INIT_KEYS:
            raise ConfigError("unknown key in [init]", line, key)
        init_kwargs[key] = _number(value, line, key)
    if init_kwargs["w"] is None:
        init_kwargs["w"] = model.b * init_kwargs["v"]
    try:
        init = SimState(**init_kwargs)
    except SpikeSimError as exc:
        raise ConfigError(str(exc)) from None

    out_kwargs = {}
    for key, (value, line) in groups["outputs"].items():
        if key not in _OUTPUT_KEYS:
            raise ConfigError("unknown key in [outputs]", line, key)
        out_kwargs[key] = value or None
    try:
        outputs = Outputs(**out_kwargs)
    except ValueError as exc:
        first = min((line for _, line in groups["outputs"].values()), default=None)
        raise ConfigError(str(exc), first) from None

    try:
        solver.check_model(model)
    except ValueError as exc:
        key = "dt" if "dt * a" in str(exc) else "theta"
        line = solver_lines.get(key) or groups["model"].get("a" if key == "dt" else "c", (None, None))[1]
        raise ConfigError(str(exc), line, key) from None

    try:
        return ExperimentConfig(
            model=model,
            current=current,
            init=init,
            solver=solver,
            outputs=outputs,
            seed=top.get("seed", 0),
            repeat=top.get("repeat", 5),
            name=top.get("name", name),
        )
    except ValueError as exc:
        raise ConfigError(str(exc), groups[None].get("repeat", (None, None))[1], "repeat") from None


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), name=path.stem)


def shipped_config_text(name="izhikevich_burst"):
    return resources.files("spikesim.experiments").joinpath(f"{name}.cfg").read_text()


def load_shipped_config(name="izhikevich_burst"):
    """One of the experiment configs bundled with the package."""
    return parse_config(shipped_config_text(name), name=name)


def format_config(config):
    """Render ``config`` back into the document format accepted by :func:`parse_config`."""

    def fmt(x):
        if isinstance(x, (tuple, list)):
            return ", ".join(fmt(y) for y in x)
        return repr(x) if isinstance(x, float) else str(x)

    lines = [f"name = {config.name}", f"seed = {config.seed}", f"repeat = {config.repeat}", "", "[model]"]
    lines += [f"{k} = {fmt(v)}" for k, v in asdict(config.model).items()]
    cur = config.current
    if cur.is_constant:
        lines += ["", "[current]", "kind = constant", f"value = {fmt(cur.values[0])}"]
    else:
        # sums of steps are written out as their piecewise-constant equivalent
        lines += ["", "[current]", "kind = piecewise-constant"]
        lines += [f"jumps = {fmt(cur.jumps)}", f"values = {fmt(cur.values)}"]
    lines += ["", "[init]"] + [f"{k} = {fmt(v)}" for k, v in asdict(config.init).items()]
    lines += ["", "[solver]"] + [f"{k} = {fmt(v)}" for k, v in asdict(config.solver).items()]
    outs = [f"{k} = {v}" for k, v in asdict(config.outputs).items() if v]
    if outs:
        lines += ["", "[outputs]"] + outs
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class BenchReport:
    scheme: str
    wall_time_median: float
    step_count: int
    first_spike_time: float
    spike_count: int
    pattern: object = None
    first_spike_w: float = math.nan
    terminated_by: str = "horizon"

    def __post_init__(self):
        if self.step_count > 0 and not self.wall_time_median > 0:
            raise ValueError("wall_time_median must be positive when steps were taken")

    def to_dict(self):
        data = asdict(self)
        data["pattern"] = pattern_dict(self.pattern)
        return data


def pattern_dict(pattern):
    if pattern is None:
        return None
    return {
        "label": pattern.label,
        "period": pattern.period,
        "residual": pattern.residual,
        "tol": pattern.tol,
        "max_period": pattern.max_period,
    }


def output_dir(default=None):
    """Directory for relative output paths: the environment override, else ``default``, else cwd."""
    return Path(os.environ.get(OUTPUT_DIR_ENV) or default or ".")


def _resolve(path, base_dir):
    if path is None:
        return None
    path = Path(path)
    return path if path.is_absolute() else Path(base_dir) / path


def _pattern_of(train):
    n = len(train)
    if n - default_transient_skip(n) < 3:
        return None
    return classify_pattern(reset_sequence(train))


def _timed_runs(config, repeat):
    solver = config.solver
    if config.outputs.trajectory_path and solver.record_every == 0:
        solver = solver.replace(record_every=1)
    times, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = simulate(config.model, config.current, config.init, solver)
        times.append(time.perf_counter() - start)
    return result, max(statistics.median(times), 1e-9)


def write_trajectory_csv(path, trajectory):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(TRAJECTORY_COLUMNS)
        for t, v, w, branch in trajectory.rows():
            out.writerow((repr(t), repr(v), repr(w), branch))


def write_spikes_csv(path, train):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(SPIKE_COLUMNS)
        for i, (t, w) in enumerate(train.events):
            out.writerow((i, repr(float(t)), repr(float(w))))


def read_spikes_csv(path):
    """Read a spikes CSV back as a list of ``(spike_time, w_at_spike)``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != SPIKE_COLUMNS:
        raise DataError(f"{path}: expected header {','.join(SPIKE_COLUMNS)}")
    events = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(SPIKE_COLUMNS):
            raise DataError(f"{path}: line {lineno} has {len(row)} fields")
        try:
            events.append((float(row[1]), float(row[2])))
        except ValueError:
            raise DataError(f"{path}: line {lineno} is not numeric") from None
    return events


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _clean(value):
    # JSON has no inf/nan
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def run_experiment(config, base_dir=None, repeat=1, write_files=True):
    """Run the configured solver, write the configured files and return a :class:`BenchReport`.

    Relative output paths are resolved against :func:`output_dir`. A solver
    failure is written to the report file as an ``error`` record and then
    re-raised.
    """
    base = output_dir(base_dir)
    outs = config.outputs
    report_path = _resolve(outs.report_path, base) if write_files else None
    try:
        (trajectory, train), wall = _timed_runs(config, repeat)
    except SpikeSimError as exc:
        if report_path:
            report_path.parent.mkdir(parents=True, exist_ok=True)
            error = {"type": type(exc).__name__, "message": str(exc)}
            _write_json(report_path, _clean({"config": config.echo(), "result": None, "error": error}))
        raise

    first = train.first()
    report = BenchReport(
        scheme=config.solver.scheme,
        wall_time_median=wall,
        step_count=train.step_count,
        first_spike_time=first[0] if first else math.nan,
        spike_count=len(train),
        pattern=_pattern_of(train),
        first_spike_w=first[1] if first else math.nan,
        terminated_by=train.terminated_by,
    )
    if write_files:
        targets = [
            (outs.trajectory_path, lambda p: write_trajectory_csv(p, trajectory)),
            (outs.spikes_path, lambda p: write_spikes_csv(p, train)),
        ]
        for rel, writer in targets:
            path = _resolve(rel, base)
            if path:
                path.parent.mkdir(parents=True, exist_ok=True)
                writer(path)
        if report_path:
            report_path.parent.mkdir(parents=True, exist_ok=True)
            data = {"config": config.echo(), "result": report.to_dict(), "error": None}
            _write_json(report_path, _clean(data))
    return report


def bench(config, repeat=None):
    """Time ``config`` over ``repeat`` runs (default ``config.repeat``) without writing files."""
    return run_experiment(config, repeat=repeat or config.repeat, write_files=False)


def _step_parameter(solver):
    return {
        "euler": solver.dt,
        "hybrid-fixed": solver.dt,
        "hybrid-adaptive": solver.epsilon,
        "oracle": solver.oracle_tol,
    }[solver.scheme]


def run_comparison(configs, csv_path=None, repeat=1):
    """Benchmark several schemes on one problem and difference their first spikes.

    Deltas are taken against the oracle row when one is present, otherwise
    against the first row.
    """
    configs = list(configs)
    if len(configs) < 2:
        raise ConfigError("a comparison needs at least two configs")
    ref = configs[0]
    for cfg in configs[1:]:
        for part in ("model", "current", "init"):
            if getattr(cfg, part) != getattr(ref, part):
                raise ConfigError(f"configs {ref.name!r} and {cfg.name!r} differ in [{part}]")
    reports = [run_experiment(cfg, repeat=repeat, write_files=False) for cfg in configs]
    base_index = next((i for i, c in enumerate(configs) if c.solver.scheme == "oracle"), 0)
    base = reports[base_index]
    rows = []
    for cfg, rep in zip(configs, reports):
        rows.append(
            {
                "scheme": rep.scheme,
                "tau_or_eps": _step_parameter(cfg.solver),
                "step_count": rep.step_count,
                "wall_time_median": rep.wall_time_median,
                "spike_count": rep.spike_count,
                "first_spike_time": rep.first_spike_time,
                "first_spike_w": rep.first_spike_w,
                "pattern": rep.pattern.label if rep.pattern else "",
                "first_spike_time_delta": rep.first_spike_time - base.first_spike_time,
                "first_spike_w_delta": rep.first_spike_w - base.first_spike_w,
            }
        )
    if csv_path:
        _write_rows(csv_path, COMPARISON_COLUMNS, rows)
    return rows


def run_error_sweep(base, taus, thetas, csv_path=None):
    """First-spike errors against the oracle over a grid of step parameters and cutoffs.

    ``tau`` sets ``dt`` for the fixed-step schemes and ``epsilon`` for
    ``hybrid-adaptive``.
    """
    taus, thetas = list(taus), list(thetas)
    if not taus or not thetas:
        raise ConfigError("error sweep needs at least one tau and one theta")
    scheme = base.solver.scheme
    if scheme == "oracle":
        raise ConfigError("error sweep compares a scheme against the oracle; pick another scheme")
    knob = "epsilon" if scheme == "hybrid-adaptive" else "dt"
    rows = []
    for theta in thetas:
        for tau in taus:
            try:
                solver = base.solver.replace(theta=theta, **{knob: tau})
                solver.check_model(base.model)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            rep = measure_empirical_error(base.model, base.current, base.init, solver, base.solver.oracle_tol)
            rows.append(
                {
                    "theta": float(theta),
                    "tau": float(tau),
                    "spike_time_error": rep.spike_time_error,
                    "w_error": rep.w_at_spike_error,
                }
            )
    if csv_path:
        _write_rows(csv_path, SWEEP_COLUMNS, rows)
    return rows


def _write_rows(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(columns)
        for row in rows:
            out.writerow([repr(v) if isinstance(v, float) else v for v in (row[c] for c in columns)])


__all__ = [
    "BenchReport",
    "ExperimentConfig",
    "OUTPUT_DIR_ENV",
    "Outputs",
    "bench",
    "format_config",
    "load_config",
    "load_shipped_config",
    "output_dir",
    "parse_config",
    "read_spikes_csv",
    "run_comparison",
    "run_error_sweep",
    "run_experiment",
    "shipped_config_text",
    "write_spikes_csv",
    "write_trajectory_csv",
]
