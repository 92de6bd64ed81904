"""Declarative experiments: config files, seeded multi-run execution and CSV/JSON output.

A config is an INI file with a single ``[experiment]`` section. Run ``r``
of an experiment uses ``derive_seed(seed, r)``; everything random in that
run is a substream of the derived seed, so results do not depend on how
runs are spread over worker processes.
"""

import configparser
import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .generators import HadamardMasks, RandomMasks, derive_seed, make_rng, random_oam_state, test_image
from .measurement import ImagingOracle, NoiseModel
from .metrics import RunTrace, aggregate, threshold_crossing
from .reconstruction import run_spi
from .tomography import (
    DIRECTION_STREAM,
    NOISE_STREAM,
    QUANTUM_VARIANTS,
    TRUTH_STREAM,
    Schedule,
    TomographyConfig,
    run_tomography,
)

log = logging.getLogger(__name__)

TRACE_COLUMNS = ("run_id", "seed", "variant", "k", "metric", "f_plus", "f_minus", "g_k",
                 "alpha_k", "beta_k", "n_plus", "n_minus")
AGGREGATE_COLUMNS = ("k", "mean", "std", "se", "n")
IMAGING_VARIANTS = ("spi", "ogi", "sgi")


class ConfigError(ValueError):
    pass


def _floats(text):
    return [float(v) for v in str(text).replace(",", " ").split()]


def _words(text):
    return [v for v in str(text).replace(",", " ").split()]


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    description: str = ""
    kind: str = "tomography"
    variants: tuple = ("sgqt", "osgqt")
    runs: int = 100
    iterations: int = 350
    seed: int = 0
    threshold: float = 0.1
    # quantum
    dimension: int = 5
    state_mode: str = "phase-only"
    # imaging
    image: str = "disk"
    image_path: str = ""
    width: int = 64
    height: int = 64
    masks: str = "random"
    mask_seed: int = -1
    ogi_normalized: bool = True
    # gains
    schedule: str = "constant"
    alpha: float = 0.05
    beta: float = 0.2
    a: float = 0.05
    A: float = 0.0
    s: float = 0.602
    b: float = 0.2
    t: float = 0.101
    # noise; gamma and integration_time may list several values, one condition each
    noise: str = "none"
    gamma: tuple = (0.0,)
    rate: float = 5e3
    integration_time: tuple = (1.0,)
    # grid sweep
    alphas: tuple = ()
    betas: tuple = ()
    # embedded checks; NaN disables
    assert_max_diff: float = math.nan
    assert_ordering: str = ""

    def __post_init__(self):
        if self.kind not in ("tomography", "imaging"):
            raise ConfigError(f"kind must be tomography or imaging, got {self.kind!r}")
        allowed = QUANTUM_VARIANTS if self.kind == "tomography" else IMAGING_VARIANTS
        if not self.variants or any(v not in allowed for v in self.variants):
            raise ConfigError(f"{self.kind} variants must be drawn from {allowed}, got {self.variants}")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.masks not in ("random", "hadamard"):
            raise ConfigError(f"masks must be random or hadamard, got {self.masks!r}")
        if self.assert_ordering and not all(v in self.variants for v in self.assert_ordering.split("<")):
            raise ConfigError(f"assert_ordering {self.assert_ordering!r} names variants not being run")
        try:
            self.schedule_obj()
            for noise in self.noise_models():
                if noise.kind == "gaussian" and self.kind == "tomography":
                    raise ConfigError("gaussian noise is only defined for imaging")
                if noise.kind == "poisson" and self.kind == "imaging":
                    raise ConfigError("poisson noise is only defined for tomography")
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_mapping(cls, values):
        kwargs = {}
        names = {f: f for f in cls.__dataclass_fields__}
        for key, raw in values.items():
            name = key.replace("-", "_")
            if name not in names:
                raise ConfigError(f"unknown config key {key!r}")
            default = cls.__dataclass_fields__[name].default
            if not isinstance(raw, str):
                kwargs[name] = tuple(raw) if isinstance(raw, list) else raw
                continue
            try:
                if name == "variants":
                    kwargs[name] = tuple(_words(raw))
                elif name in ("gamma", "integration_time", "alphas", "betas"):
                    kwargs[name] = tuple(_floats(raw))
                elif isinstance(default, bool):
                    kwargs[name] = raw.strip().lower() in ("1", "true", "yes", "on")
                elif isinstance(default, int):
                    kwargs[name] = int(raw)
                elif isinstance(default, float):
                    kwargs[name] = float(raw)
                else:
                    kwargs[name] = raw.strip()
            except ValueError:
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path):
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from None
        if "experiment" not in parser:
            raise ConfigError(f"{path}: missing [experiment] section")
        return cls.from_mapping(dict(parser["experiment"]))

    def to_dict(self):
        d = asdict(self)
        for key, value in d.items():
            if isinstance(value, tuple):
                d[key] = list(value)
            elif isinstance(value, float) and math.isnan(value):
                d[key] = None
        return d

    @property
    def config_hash(self):
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def schedule_obj(self):
        if self.schedule == "constant":
            return Schedule.constant(self.alpha, self.beta)
        if self.schedule == "power-law":
            return Schedule.power_law(self.a, self.b, self.A, self.s, self.t)
        raise ValueError(f"unknown schedule {self.schedule!r}")

    def noise_models(self):
        if self.noise == "none":
            return [NoiseModel()]
        if self.noise == "gaussian":
            return [NoiseModel.gaussian(g) for g in self.gamma]
        if self.noise == "poisson":
            return [NoiseModel.poisson(self.rate, i) for i in self.integration_time]
        raise ValueError(f"unknown noise kind {self.noise!r}")

    def conditions(self):
        """(label, NoiseModel) pairs; the label is empty when there is a single condition."""
        models = self.noise_models()
        if len(models) == 1:
            return [("", models[0])]
        if self.noise == "gaussian":
            return [(f"gamma={m.gamma:g}", m) for m in models]
        return [(f"I={m.integration_time:g}", m) for m in models]


def load_config(name_or_path):
    """Read a config file, or a bundled preset when no such file exists."""
    path = Path(name_or_path)
    if path.is_file():
        return ExperimentConfig.from_file(path)
    presets = preset_paths()
    if str(name_or_path) in presets:
        return ExperimentConfig.from_file(presets[str(name_or_path)])
    raise ConfigError(f"no config file or preset named {name_or_path!r}")


def preset_paths():
    root = resources.files("selfguided") / "presets"
    return {p.name[:-4]: p for p in sorted(root.iterdir(), key=lambda p: p.name) if p.name.endswith(".cfg")}


def _tag(variant, label):
    return variant if not label else f"{variant}@{label}"


def _imaging_object(config):
    return test_image(config.image, config.width, config.height, path=config.image_path or None)


def _run_one(config, cond_index, variant, run_id):
    """Simulate one (condition, variant, run) cell. Top-level so worker processes can pickle it."""
    _, noise = config.conditions()[cond_index]
    seed = derive_seed(config.seed, run_id)
    if config.kind == "tomography":
        psi = random_oam_state(config.dimension, make_rng(seed, TRUTH_STREAM), config.state_mode)
        tcfg = TomographyConfig(config.dimension, config.iterations, variant, config.schedule_obj(), noise,
                                seed, config.state_mode)
        trace = run_tomography(tcfg, psi, run_id=run_id)
    else:
        obj = _imaging_object(config).ravel()
        if config.masks == "random":
            masks = RandomMasks(obj.size, config.iterations, int(make_rng(seed, DIRECTION_STREAM).integers(2**63)))
        else:
            masks = HadamardMasks(obj.size, config.iterations, seed=None if config.mask_seed < 0 else config.mask_seed)
        noise_seed = int(make_rng(seed, NOISE_STREAM).integers(2**63))
        if variant == "sgi":
            tcfg = TomographyConfig(obj.size, config.iterations, "sgi", config.schedule_obj(), noise, seed)
            trace = run_tomography(tcfg, obj, ImagingOracle(obj, noise, noise_seed), masks=masks, run_id=run_id)
        else:
            trace = run_spi(obj, masks, variant, noise, noise_seed, run_id, config.ogi_normalized)
            trace.seed = seed
    trace.estimate = None
    return trace


def simulate(config, jobs=1):
    """Run every (condition, variant, run) cell; returns {tag: [RunTrace, ...]} in run order."""
    cells = [(c, v, r) for c in range(len(config.conditions())) for v in config.variants for r in range(config.runs)]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            traces = list(pool.map(_run_one, *zip(*[(config, c, v, r) for c, v, r in cells]),
                                   chunksize=max(1, len(cells) // (4 * jobs))))
    else:
        traces = [_run_one(config, c, v, r) for c, v, r in cells]
    labels = [label for label, _ in config.conditions()]
    out = {}
    for (c, v, _), trace in zip(cells, traces):
        out.setdefault(_tag(v, labels[c]), []).append(trace)
    return out


def summarize(config, results):
    summary = {
        "tool": "selfguided",
        "version": __version__,
        "config_hash": config.config_hash,
        "config": config.to_dict(),
        "seeds": [derive_seed(config.seed, r) for r in range(config.runs)],
        "results": {},
        "assertions": [],
    }
    for tag, traces in results.items():
        agg = aggregate(traces)
        summary["results"][tag] = {
            "variant": traces[0].variant,
            "final_mean": float(agg.mean[-1]),
            "final_std": float(agg.std[-1]),
            "final_se": float(agg.se[-1]),
            "threshold": config.threshold,
            "threshold_k": threshold_crossing(agg, config.threshold),
            "skipped_steps": sum(len(t.skipped) for t in traces),
            "runs": agg.n,
        }
    labels = [label for label, _ in config.conditions()]
    if len(config.variants) >= 2:
        first, second = config.variants[:2]
        diffs = {}
        for label in labels:
            a = results[_tag(first, label)]
            b = results[_tag(second, label)]
            diffs[label or "all"] = max(float(np.max(np.abs(x.metrics - y.metrics))) for x, y in zip(a, b))
        summary["max_abs_diff"] = {"variants": [first, second], "per_condition": diffs,
                                   "max": max(diffs.values())}
        if not math.isnan(config.assert_max_diff):
            worst = summary["max_abs_diff"]["max"]
            summary["assertions"].append({
                "name": f"max |{first} - {second}| < {config.assert_max_diff:g}",
                "passed": bool(worst < config.assert_max_diff),
                "value": worst,
            })
    if config.assert_ordering:
        lo, hi = config.assert_ordering.split("<")
        for label in labels:
            vlo = summary["results"][_tag(lo, label)]["final_mean"]
            vhi = summary["results"][_tag(hi, label)]["final_mean"]
            summary["assertions"].append({
                "name": f"final mean {_tag(lo, label)} < {_tag(hi, label)}",
                "passed": bool(vlo < vhi),
                "value": [vlo, vhi],
            })
    return summary


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def trace_csv(trace, config_hash):
    buf = io.StringIO()
    buf.write(f"# config_hash={config_hash}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    for i in range(len(trace)):
        n_plus, n_minus = trace.n_plus[i], trace.n_minus[i]
        writer.writerow([
            trace.run_id, trace.seed, trace.variant, trace.k[i], _fmt(trace.metric[i]),
            _fmt(trace.f_plus[i]), _fmt(trace.f_minus[i]), _fmt(trace.g_k[i]),
            _fmt(trace.alpha_k[i]), _fmt(trace.beta_k[i]),
            "" if math.isnan(n_plus) else int(n_plus), "" if math.isnan(n_minus) else int(n_minus),
        ])
    return buf.getvalue()


def aggregate_csv(agg, config_hash):
    buf = io.StringIO()
    buf.write(f"# config_hash={config_hash}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(AGGREGATE_COLUMNS)
    for k in range(len(agg)):
        writer.writerow([k, _fmt(float(agg.mean[k])), _fmt(float(agg.std[k])), _fmt(float(agg.se[k])), agg.n])
    return buf.getvalue()


def _write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _file_tag(tag):
    return tag.replace("@", "_").replace("=", "")


def write_results(config, results, outdir):
    """Write per-run trace CSVs, one aggregate CSV per tag and summary.json; returns the summary."""
    outdir = Path(outdir)
    h = config.config_hash
    for tag, traces in results.items():
        for trace in traces:
            _write(outdir / "traces" / f"{_file_tag(tag)}_run{trace.run_id:04d}.csv", trace_csv(trace, h))
        _write(outdir / f"aggregate_{_file_tag(tag)}.csv", aggregate_csv(aggregate(traces), h))
    summary = summarize(config, results)
    _write(outdir / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def run_experiment(config, outdir=None, jobs=1):
    """Simulate ``config`` and write its result files to ``outdir`` (default ``results/<name>``)."""
    outdir = Path(outdir) if outdir is not None else Path("results") / config.name
    results = simulate(config, jobs)
    return write_results(config, results, outdir)


def read_trace_csv(path):
    """Parse a trace CSV back into (config_hash, RunTrace)."""
    with open(path, newline="") as fh:
        first = fh.readline()
        if not first.startswith("# config_hash="):
            raise ValueError(f"{path}: missing config hash line")
        config_hash = first.strip().split("=", 1)[1]
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        trace = None
        for row in reader:
            if trace is None:
                trace = RunTrace(run_id=int(row["run_id"]), seed=int(row["seed"]), variant=row["variant"])
            if int(row["k"]) != len(trace):
                raise ValueError(f"{path}: rows out of order at k={row['k']}")
            values = {c: (float(row[c]) if row[c] else None) for c in TRACE_COLUMNS[5:]}
            trace.append(float(row["metric"]), **values)
    if trace is None:
        raise ValueError(f"{path}: no rows")
    return config_hash, trace


def aggregate_files(paths):
    """Aggregate trace CSVs; refuses to mix files written under different configs."""
    hashes = set()
    traces = []
    for path in paths:
        h, trace = read_trace_csv(path)
        hashes.add(h)
        traces.append(trace)
    if len(hashes) > 1:
        raise ValueError(f"refusing to aggregate traces from {len(hashes)} different configs")
    return aggregate(traces)


@dataclass
class SweepResult:
    alphas: list
    betas: list
    table: list = field(default_factory=list)
    best: dict = field(default_factory=dict)


def grid_sweep(alphas, betas, base, jobs=1):
    """Run ``base`` for every (alpha, beta) pair and report mean final metrics and the best cell per variant."""
    alphas = list(alphas)
    betas = list(betas)
    if not alphas or not betas:
        raise ConfigError("sweep grids must be nonempty")
    result = SweepResult(alphas, betas)
    for alpha in alphas:
        for beta in betas:
            cfg = replace(base, alpha=alpha, beta=beta, schedule="constant", alphas=(), betas=())
            summary = summarize(cfg, simulate(cfg, jobs))
            for tag, res in summary["results"].items():
                row = {"alpha": alpha, "beta": beta, "tag": tag, "variant": res["variant"],
                       "final_mean": res["final_mean"], "final_se": res["final_se"],
                       "threshold_k": res["threshold_k"]}
                result.table.append(row)
                best = result.best.get(tag)
                if best is None or row["final_mean"] < best["final_mean"]:
                    result.best[tag] = row
    return result


def write_sweep(config, sweep, outdir):
    outdir = Path(outdir)
    buf = io.StringIO()
    buf.write(f"# config_hash={config.config_hash}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("alpha", "beta", "variant", "final_mean", "final_se", "threshold_k"))
    for row in sweep.table:
        writer.writerow((_fmt(row["alpha"]), _fmt(row["beta"]), row["tag"], _fmt(row["final_mean"]),
                         _fmt(row["final_se"]), _fmt(row["threshold_k"])))
    _write(outdir / "sweep.csv", buf.getvalue())
    summary = {"tool": "selfguided", "version": __version__, "config_hash": config.config_hash,
               "config": config.to_dict(), "best": sweep.best, "table": sweep.table}
    _write(outdir / "sweep.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
