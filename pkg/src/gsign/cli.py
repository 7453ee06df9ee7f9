"""Command-line front end.

Every option can be given as a flag or as a key of a JSON file passed with
``--config``; flags win over file values. Exit status is 0 on success and 1
on any configuration, data or runtime error. It never encodes the test
decision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib import resources

import numpy as np

from . import __version__
from .core import KernelSpec, ScalingSpec
from .io import (
    _csv_text,
    oracle_rows,
    pairwise_compare,
    quantile_split,
    read_csv_matrix,
    render,
)
from .resampling import one_sample_test, two_sample_test
from .simgen import (
    DEFAULT_DELTAS,
    CovarianceSpec,
    MeanSpec,
    ScenarioSpec,
    TestConfig,
    default_threads,
    oracle_null,
    power_study,
)
from .statistics import GroupLabels


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _bool(s):
    if isinstance(s, bool):
        return s
    v = str(s).lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {s!r}")


def _param(s):
    """Kernel parameter: a number or the literal 'p' (the data dimension)."""
    if isinstance(s, (int, float)):
        return s
    if str(s).strip().lower() == "p":
        return "p"
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'p', got {s!r}") from None


def _floats(s):
    if isinstance(s, list):
        return [float(v) for v in s]
    return [float(v) for v in str(s).split(",") if v.strip()]


def _opt_float(s):
    if s is None or str(s).lower() in ("auto", "none", "null"):
        return None
    return float(s)


def _opt_int(s):
    if s is None or str(s).lower() in ("none", "null", "0"):
        return None
    return int(s)


# key -> (type, default, help); shared by flags and JSON config
TEST_OPTS = {
    "scaling": (str, "l2", "scaling function: identity, l1, l2 or linf"),
    "threshold": (_opt_float, None, "sign threshold; 'auto' uses n^(-8/p)"),
    "kernel": (str, "linear", "kernel: linear or poly"),
    "a": (_param, 1.0, "polynomial kernel offset (number or 'p')"),
    "b": (_param, 1, "polynomial kernel degree (integer or 'p')"),
    "B": (int, 1000, "number of randomization resamples"),
    "alpha": (float, 0.05, "significance level"),
    "seed": (int, 0, "random seed"),
}
OUT_OPTS = {
    "out": (str, None, "output file"),
    "format": (str, None, "output format, csv or json"),
    "stdout": (_bool, False, "write the artifact to standard output"),
}
DATA_OPTS = {
    "data": (str, None, "input CSV file"),
    "header": (_bool, False, "input CSV has a header row"),
}
SCENARIO_OPTS = {
    "design": (str, "one-sample", "one-sample or two-sample"),
    "distribution": (str, "mvg", "mvg or t3"),
    "covariance": (str, "AR", "AR or SAR"),
    "rho": (float, 0.5, "AR correlation decay"),
    "spike_count": (int, 5, "number of spiked diagonal entries (SAR)"),
    "spike_value": (_opt_float, None, "spiked diagonal value (SAR)"),
    "mean": (str, "dense", "mean pattern: zero, sparse or dense"),
    "dense_fraction": (float, 0.9, "fraction of coordinates carrying the dense pattern"),
    "t_unit_covariance": (_bool, False, "scale t3 draws so their covariance equals Sigma"),
    "p": (int, 300, "dimension"),
    "n": (int, 100, "sample size (one-sample)"),
    "n1": (int, 60, "first group size (two-sample)"),
    "n2": (int, 40, "second group size (two-sample)"),
    "deltas": (_floats, None, "comma-separated delta grid"),
    "replications": (int, 1000, "datasets per delta"),
    "threads": (int, None, "worker processes"),
    "tests": (None, None, "list of test configurations (JSON config only)"),
}
SHOWN_DEFAULTS = {
    "threshold": "auto, n^(-8/p)",
    "spike_value": "p+1",
    "deltas": "reference grid for the design",
    "threads": "GSIGN_THREADS or CPU count",
    "out": "standard output",
    "format": "from --out extension",
}
SINGLE_TEST_KEYS = ("scaling", "threshold", "kernel", "a", "b")

COMMANDS = {
    "test-one": dict(DATA_OPTS, mu0=(str, None, "CSV with one row mu0 subtracted before testing"),
                     **TEST_OPTS, **OUT_OPTS),
    "test-two": dict(DATA_OPTS, data2=(str, None, "second-group CSV file"),
                     label_column=(str, None, "column holding a two-class label"),
                     score_column=(str, None, "column holding a trait score (with --quantile)"),
                     quantile=(float, None, "compare top and bottom k percent of the score"),
                     **TEST_OPTS, **OUT_OPTS),
    "simulate": dict(SCENARIO_OPTS, oracle=(_opt_int, None, "oracle-null draws S; adds ON columns"),
                     **TEST_OPTS, **OUT_OPTS),
    "pairwise": dict(DATA_OPTS, label_column=(str, None, "column holding the class label"),
                     **TEST_OPTS, **OUT_OPTS),
    "oracle": dict(SCENARIO_OPTS, S=(int, 5000, "number of simulated null datasets"),
                   **TEST_OPTS, **OUT_OPTS),
}
HELP = {
    "test-one": "one-sample test of H0: mu = mu0 (default mu0 = 0)",
    "test-two": "two-sample test of H0: mu1 = mu2",
    "simulate": "Monte Carlo power/size study",
    "pairwise": "pairwise two-sample tests between all classes of a labeled CSV",
    "oracle": "simulate the null distribution of the statistic (oracle null)",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gsign", description="Generalized multivariate sign tests for high-dimensional means.")
    parser.add_argument("--version", action="version", version=f"gsign {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, opts in COMMANDS.items():
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--config", default=None,
                       help="JSON config file or bundled config name; flags override its values")
        for key, (typ, default, text) in opts.items():
            if typ is None:
                continue
            flag = f"--{key.replace('_', '-')}"
            shown = SHOWN_DEFAULTS.get(key, default)
            if typ is _bool:
                p.add_argument(flag, dest=key, action="store_const", const=True,
                               default=argparse.SUPPRESS, help=f"{text} (default: off)")
            else:
                p.add_argument(flag, dest=key, type=typ, default=argparse.SUPPRESS,
                               help=f"{text} (default: {shown})")
    return parser


def bundled_configs() -> list:
    root = resources.files("gsign") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path: str) -> dict:
    if not os.path.exists(path):
        candidate = resources.files("gsign") / "configs" / path
        if not candidate.is_file() and not path.endswith(".json"):
            candidate = resources.files("gsign") / "configs" / f"{path}.json"
        if not candidate.is_file():
            raise CliError(f"config file not found: {path}")
        text = candidate.read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise CliError(f"{path}: config must be a JSON object")
    return cfg


def resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Defaults, then config file values, then command-line flags."""
    opts = COMMANDS[command]
    flags = {k: v for k, v in vars(args).items() if k in opts}
    merged = {k: d for k, (_, d, _) in opts.items()}
    if args.config:
        cfg = load_config(args.config)
        unknown = sorted(set(cfg) - set(opts))
        if unknown:
            raise CliError(f"unknown config keys for {command}: {', '.join(unknown)}")
        for k, v in cfg.items():
            typ = opts[k][0]
            try:
                merged[k] = typ(v) if (typ is not None and v is not None) else v
            except (TypeError, ValueError, argparse.ArgumentTypeError) as exc:
                raise CliError(f"config key {k!r}: {exc}") from None
    merged.update(flags)
    if "tests" in merged and any(k in flags for k in SINGLE_TEST_KEYS):
        merged["tests"] = None
    return merged


def _resolve_param(v, p):
    return float(p) if v == "p" else v


def make_test(entry: dict, p: int) -> TestConfig:
    unknown = set(entry) - set(SINGLE_TEST_KEYS)
    if unknown:
        raise CliError(f"unknown test keys: {', '.join(sorted(unknown))}")
    kind = entry.get("kernel", "linear")
    scaling = ScalingSpec(entry.get("scaling", "l2"), _opt_float(entry.get("threshold")))
    if str(kind).lower() == "linear":
        return TestConfig(scaling, KernelSpec("linear"))
    a = _resolve_param(_param(entry.get("a", 1.0)), p)
    b = _resolve_param(_param(entry.get("b", 1)), p)
    if float(b) != int(b):
        raise CliError(f"polynomial degree must be an integer, got {b}")
    return TestConfig(scaling, KernelSpec(kind, float(a), int(b)))


def _single_test(o: dict, p: int) -> TestConfig:
    return make_test({k: o[k] for k in SINGLE_TEST_KEYS}, p)


def _emit(text: str, o: dict) -> None:
    if o.get("stdout") or not o.get("out"):
        sys.stdout.write(text)
        sys.stdout.flush()
    if o.get("out"):
        with open(o["out"], "w", newline="") as fh:
            fh.write(text)


def _out_format(o: dict, default: str) -> str:
    if o.get("format"):
        return o["format"]
    out = o.get("out") or ""
    if out.lower().endswith(".json"):
        return "json"
    if out.lower().endswith(".csv"):
        return "csv"
    return default


def _require_data(o):
    if not o.get("data"):
        raise CliError("--data is required")
    return read_csv_matrix(o["data"], has_header=o["header"])


def cmd_test_one(o: dict) -> None:
    ds = _require_data(o)
    X = ds.X
    if o.get("mu0"):
        mu0 = read_csv_matrix(o["mu0"]).X.ravel()
        if mu0.size != X.shape[1]:
            raise CliError(f"mu0 has {mu0.size} entries but the data have p={X.shape[1]}")
        X = X - mu0
    test = _single_test(o, X.shape[1])
    res = one_sample_test(X, test.scaling, test.kernel, o["B"], o["alpha"], o["seed"])
    _emit(render(res, _out_format(o, "json")), o)


def cmd_test_two(o: dict) -> None:
    if not o.get("data"):
        raise CliError("--data is required")
    if o.get("data2"):
        ds = _require_data(o)
        ds2 = read_csv_matrix(o["data2"], has_header=o["header"])
        if ds2.X.shape[1] != ds.X.shape[1]:
            raise CliError(f"dimension mismatch: {ds.X.shape[1]} vs {ds2.X.shape[1]} columns")
        X = np.vstack([ds.X, ds2.X])
        labels = GroupLabels.from_sizes(ds.n, ds2.n)
    elif o.get("quantile") is not None:
        if not o.get("score_column"):
            raise CliError("--quantile needs --score-column")
        scored = read_csv_matrix(o["data"], has_header=o["header"], score_column=o["score_column"])
        X, labels = quantile_split(scored, o["quantile"])
    elif o.get("label_column"):
        lab = read_csv_matrix(o["data"], has_header=o["header"], label_column=o["label_column"])
        classes = lab.classes()
        if len(classes) != 2:
            raise CliError(f"label column must hold exactly 2 classes, found {len(classes)}: {classes}")
        X = lab.X
        labels = GroupLabels(np.where(lab.labels == classes[0], 1, 2))
    else:
        raise CliError("give --data2, --label-column, or --score-column with --quantile")
    test = _single_test(o, X.shape[1])
    res = two_sample_test(X, labels, test.scaling, test.kernel, o["B"], o["alpha"], o["seed"])
    _emit(render(res, _out_format(o, "json")), o)


def cmd_pairwise(o: dict) -> None:
    if not o.get("data"):
        raise CliError("--data is required")
    if not o.get("label_column"):
        raise CliError("--label-column is required")
    ds = read_csv_matrix(o["data"], has_header=o["header"], label_column=o["label_column"])
    test = _single_test(o, ds.X.shape[1])
    pm = pairwise_compare(ds, test.scaling, test.kernel, o["B"], o["alpha"], o["seed"])
    _emit(render(pm, _out_format(o, "csv")), o)


def scenario_from_options(o: dict) -> ScenarioSpec:
    p = o["p"]
    if o.get("tests"):
        if not isinstance(o["tests"], list):
            raise CliError("'tests' must be a list of objects")
        tests = tuple(make_test(t, p) for t in o["tests"])
    else:
        tests = (_single_test(o, p),)
    cov = CovarianceSpec(o["covariance"], o["rho"], o["spike_count"], o["spike_value"])
    mean = MeanSpec(o["mean"], 0.0, o["dense_fraction"])
    deltas = o.get("deltas")
    if deltas is None:
        key = (o["design"].lower(), cov.kind, mean.kind)
        deltas = DEFAULT_DELTAS.get(key, [0.0])
    return ScenarioSpec(design=o["design"], distribution=o["distribution"], covariance=cov, mean=mean,
                        p=p, n=o["n"], n1=o["n1"], n2=o["n2"], tests=tests, B=o["B"], alpha=o["alpha"],
                        deltas=tuple(deltas), replications=o["replications"], master_seed=o["seed"],
                        t_unit_covariance=o["t_unit_covariance"])


def _threads(o):
    return o["threads"] if o.get("threads") else default_threads()


def cmd_simulate(o: dict) -> None:
    spec = scenario_from_options(o)
    threads = _threads(o)
    oracle = None
    if o.get("oracle"):
        oracle = oracle_null(spec, o["oracle"], threads, progress="oracle draws")
    table = power_study(spec, oracle, threads, progress="replicates")
    _emit(render(table, _out_format(o, "csv")), o)


def cmd_oracle(o: dict) -> None:
    spec = scenario_from_options(o)
    nulls = oracle_null(spec, o["S"], _threads(o), progress="oracle draws")
    _emit(_csv_text(oracle_rows([t.label for t in spec.tests], nulls)), o)


HANDLERS = {
    "test-one": cmd_test_one,
    "test-two": cmd_test_two,
    "simulate": cmd_simulate,
    "pairwise": cmd_pairwise,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = resolve_options(args.command, args)
        HANDLERS[args.command](options)
    except (CliError, ValueError, OSError, ArithmeticError) as exc:
        print(f"gsign {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
