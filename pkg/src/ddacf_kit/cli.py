"""Experiment runner CLI: synth, run, report.

``run`` executes the Cartesian product of the feature grid and model list
via cross-validation (or an optional holdout split), one result row per
(configuration, model), and emits a results CSV, per-run ROC TSVs, a text
summary and rendered figures.  Grid flags take comma-separated value
lists; a flat ``key = value`` config file (repeated keys for grids) can
supply any flag, with command-line flags taking precedence.  The
DDACF_SEED environment variable supplies the seed when neither does.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from pathlib import Path

from .corpus import filter_users, load_corpus
from .errors import ToolkitError
from .evaluation import (
    MODEL_KINDS,
    cross_validate,
    model_spec,
    run_holdout,
)
from .features import AccountMode, FeatureConfig, Selector, SentimentMode, UseWords
from .pipeline import PreparedCorpus
from .report import (
    CONFIG_COLUMNS,
    CSV_COLUMNS,
    ExperimentRow,
    run_id,
    sort_rows,
    write_csv,
    write_roc_tsv,
    write_summary,
)
from .resources import load_resources
from .synth import SynthParams, generate

GRID_FIELDS = (
    "self_center",
    "tfidf",
    "selector",
    "selector_k",
    "sentiment",
    "use_words",
    "account_measures",
    "synonyms",
)

GRID_DEFAULTS = {
    "self_center": "true",
    "tfidf": "true",
    "selector": "infogain",
    "selector_k": "200",
    "sentiment": "mixed",
    "use_words": "deptsent",
    "account_measures": "categorical",
    "synonyms": "true",
}

# config-file key -> grid field (the CLI flag for measures is shorter)
_KEY_ALIASES = {"measures": "account_measures"}


def parse_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ValueError(f"expected true/false, got {raw!r}")


def parse_config_file(path) -> dict[str, list[str]]:
    """Flat key = value text; repeated keys accumulate grid values."""
    values: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{line_no}: expected 'key = value'")
            key, _, raw = line.partition("=")
            key = key.strip().lower().replace("-", "_")
            key = _KEY_ALIASES.get(key, key)
            parts = [v.strip() for v in raw.split(",") if v.strip()]
            if not parts:
                raise ValueError(f"{path}:{line_no}: empty value for {key!r}")
            values.setdefault(key, []).extend(parts)
    return values


def _values(flag: str | None, file_values: dict, key: str, default: str) -> list[str]:
    """Grid values with flag > config file > default precedence, deduplicated."""
    if flag is not None:
        raw = flag.split(",")
    elif key in file_values:
        raw = file_values[key]
    else:
        raw = default.split(",")
    out: list[str] = []
    for v in raw:
        v = v.strip().lower()
        if v and v not in out:
            out.append(v)
    return out


def _scalar(flag, file_values: dict, key: str, default):
    if flag is not None:
        return flag
    if key in file_values:
        return file_values[key][-1]
    return default


def make_config(values: dict[str, str], use_text: bool = True, use_account: bool = True) -> FeatureConfig:
    return FeatureConfig(
        self_center=parse_bool(values["self_center"]),
        tfidf=parse_bool(values["tfidf"]),
        selector=Selector(values["selector"]),
        selector_k=int(values["selector_k"]),
        sentiment=SentimentMode(values["sentiment"]),
        use_words=UseWords(values["use_words"]),
        account_measures=AccountMode(values["account_measures"]),
        synonyms=parse_bool(values["synonyms"]),
        use_text=use_text,
        use_account=use_account,
    )


def expand_grid(grid: dict[str, list[str]]) -> list[dict[str, str]]:
    """Cartesian product of grid values, one flat config dict per point."""
    combos = product(*(grid[f] for f in GRID_FIELDS))
    return [dict(zip(GRID_FIELDS, combo)) for combo in combos]


@dataclass
class RunSettings:
    folds: int
    seed: int
    holdout: float | None
    sparse_threshold: float
    use_text: bool
    use_account: bool
    hyper: dict


class Runner:
    """Executes (configuration, models) tasks against one loaded corpus."""

    def __init__(self, corpus, resources, settings: RunSettings):
        self.corpus = corpus
        self.resources = resources
        self.settings = settings
        self._prepared: dict[bool, PreparedCorpus] = {}

    def prepared(self, self_center: bool) -> PreparedCorpus:
        if self_center not in self._prepared:
            self._prepared[self_center] = PreparedCorpus.prepare(
                self.corpus, self_center, self.resources
            )
        return self._prepared[self_center]

    def _evaluate(self, cfg: FeatureConfig, specs):
        s = self.settings
        prepared = self.prepared(cfg.self_center)
        if s.holdout is not None:
            return {
                spec.name: run_holdout(
                    self.corpus, cfg, spec, s.holdout, seed=s.seed,
                    resources=self.resources, prepared=prepared,
                    sparse_threshold=s.sparse_threshold,
                )
                for spec in specs
            }
        return cross_validate(
            self.corpus, cfg, specs, k=s.folds, seed=s.seed,
            resources=self.resources, prepared=prepared,
            sparse_threshold=s.sparse_threshold,
        )

    def run_config(self, config_values: dict[str, str], models: list[str]) -> list[ExperimentRow]:
        s = self.settings
        cfg = make_config(config_values, use_text=s.use_text, use_account=s.use_account)
        specs = [model_spec(m, **s.hyper) for m in models]
        try:
            reports = self._evaluate(cfg, specs)
            return [
                ExperimentRow(config=config_values, model=name, report=reports[name])
                for name in models
            ]
        except Exception:
            # isolate the failure per model so healthy runs still report
            rows = []
            for spec in specs:
                try:
                    report = self._evaluate(cfg, [spec])[spec.name]
                    rows.append(
                        ExperimentRow(config=config_values, model=spec.name, report=report)
                    )
                except Exception as exc:
                    rows.append(
                        ExperimentRow(
                            config=config_values,
                            model=spec.name,
                            status="error",
                            message=str(exc) or type(exc).__name__,
                        )
                    )
            return rows


_WORKER_RUNNER: Runner | None = None


def _worker_init(corpus_path, resource_paths, settings):
    global _WORKER_RUNNER
    corpus = filter_users(load_corpus(corpus_path))
    resources = load_resources(**resource_paths)
    _WORKER_RUNNER = Runner(corpus, resources, settings)


def _worker_run(task):
    config_values, models = task
    return _WORKER_RUNNER.run_config(config_values, models)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddacf",
        description="Depression detection experiments over content and activity features",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p_synth.add_argument("--out", required=True, help="output corpus file")
    p_synth.add_argument("--n-users", type=int, default=200)
    p_synth.add_argument("--depressed-fraction", type=float, default=0.5)
    p_synth.add_argument("--tweets-min", type=int, default=8)
    p_synth.add_argument("--tweets-max", type=int, default=30)
    p_synth.add_argument("--s-text", type=float, default=0.0)
    p_synth.add_argument("--pronoun-boost", type=float, default=0.0)
    p_synth.add_argument("--s-act", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=None)

    p_run = sub.add_parser("run", help="run an experiment grid")
    p_run.add_argument("--config", help="flat key = value config file")
    p_run.add_argument("--corpus", help="corpus file (JSON lines)")
    p_run.add_argument("--out", help="output directory (default: ./ddacf-out)")
    p_run.add_argument("--model", help=f"comma list from {','.join(MODEL_KINDS)}")
    p_run.add_argument("--self-center", help="grid: true,false")
    p_run.add_argument("--tfidf", help="grid: true,false")
    p_run.add_argument("--selector", help="grid: infogain,mostfreq")
    p_run.add_argument("--selector-k", help="grid: positive integers")
    p_run.add_argument("--sentiment", help="grid: avg,mixed,none")
    p_run.add_argument("--use-words", help="grid: deptsent,nonsparse")
    p_run.add_argument("--measures", help="grid: asis,norm,categorical")
    p_run.add_argument("--synonyms", help="grid: true,false")
    p_run.add_argument("--use-text", action=argparse.BooleanOptionalAction, default=None,
                       help="include term features (ablation switch)")
    p_run.add_argument("--use-account", action=argparse.BooleanOptionalAction, default=None,
                       help="include account features (ablation switch)")
    p_run.add_argument("--folds", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--holdout", type=float, default=None,
                       help="evaluate on a held-out fraction instead of CV")
    p_run.add_argument("--jobs", type=int, default=None)
    p_run.add_argument("--stopwords")
    p_run.add_argument("--lexicon")
    p_run.add_argument("--negators")
    p_run.add_argument("--thesaurus")
    p_run.add_argument("--sparse-threshold", type=float, default=None)
    p_run.add_argument("--svm-c", type=float, default=None)
    p_run.add_argument("--svm-sigma", type=float, default=None)
    p_run.add_argument("--dt-max-depth", type=int, default=None)
    p_run.add_argument("--dt-ccp-alpha", type=float, default=None)
    p_run.add_argument("--nb-alpha", type=float, default=None)
    p_run.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)

    p_rep = sub.add_parser("report", help="rebuild summary and figures from a results CSV")
    p_rep.add_argument("--results", required=True, help="existing results.csv")
    p_rep.add_argument("--out", help="output directory (default: alongside results)")
    p_rep.add_argument("--figures", action=argparse.BooleanOptionalAction, default=True)
    return parser


def _env_seed() -> int:
    raw = os.environ.get("DDACF_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"DDACF_SEED must be an integer, got {raw!r}") from None


def cmd_synth(args) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    params = SynthParams(
        n_users=args.n_users,
        depressed_fraction=args.depressed_fraction,
        tweets_min=args.tweets_min,
        tweets_max=args.tweets_max,
        s_text=args.s_text,
        pronoun_boost=args.pronoun_boost,
        s_act=args.s_act,
        seed=seed,
    )
    path = generate(params, args.out)
    print(f"wrote {path}")
    return 0


def cmd_run(args) -> int:
    file_values = parse_config_file(args.config) if args.config else {}

    corpus_path = _scalar(args.corpus, file_values, "corpus", None)
    if not corpus_path:
        raise ValueError("no corpus given (use --corpus or a config file)")
    out_dir = Path(_scalar(args.out, file_values, "out", "ddacf-out"))

    grid = {
        "self_center": _values(args.self_center, file_values, "self_center", GRID_DEFAULTS["self_center"]),
        "tfidf": _values(args.tfidf, file_values, "tfidf", GRID_DEFAULTS["tfidf"]),
        "selector": _values(args.selector, file_values, "selector", GRID_DEFAULTS["selector"]),
        "selector_k": _values(args.selector_k, file_values, "selector_k", GRID_DEFAULTS["selector_k"]),
        "sentiment": _values(args.sentiment, file_values, "sentiment", GRID_DEFAULTS["sentiment"]),
        "use_words": _values(args.use_words, file_values, "use_words", GRID_DEFAULTS["use_words"]),
        "account_measures": _values(args.measures, file_values, "account_measures", GRID_DEFAULTS["account_measures"]),
        "synonyms": _values(args.synonyms, file_values, "synonyms", GRID_DEFAULTS["synonyms"]),
    }
    models = _values(args.model, file_values, "model", ",".join(MODEL_KINDS))
    for m in models:
        if m not in MODEL_KINDS:
            raise ValueError(f"unknown model {m!r}; expected one of {MODEL_KINDS}")

    seed = args.seed if args.seed is not None else (
        int(file_values["seed"][-1]) if "seed" in file_values else _env_seed()
    )
    holdout_raw = _scalar(args.holdout, file_values, "holdout", None)
    settings = RunSettings(
        folds=int(_scalar(args.folds, file_values, "folds", 10)),
        seed=seed,
        holdout=float(holdout_raw) if holdout_raw is not None else None,
        sparse_threshold=float(_scalar(args.sparse_threshold, file_values, "sparse_threshold", 0.95)),
        use_text=args.use_text if args.use_text is not None else (
            parse_bool(file_values["use_text"][-1]) if "use_text" in file_values else True
        ),
        use_account=args.use_account if args.use_account is not None else (
            parse_bool(file_values["use_account"][-1]) if "use_account" in file_values else True
        ),
        hyper={
            "svm_c": float(_scalar(args.svm_c, file_values, "svm_c", 1.0)),
            "svm_sigma": (
                float(_scalar(args.svm_sigma, file_values, "svm_sigma", 0) or 0) or None
            ),
            "dt_max_depth": (
                int(_scalar(args.dt_max_depth, file_values, "dt_max_depth", 0) or 0) or None
            ),
            "dt_ccp_alpha": float(_scalar(args.dt_ccp_alpha, file_values, "dt_ccp_alpha", 0.0)),
            "nb_alpha": float(_scalar(args.nb_alpha, file_values, "nb_alpha", 1.0)),
        },
    )
    resource_paths = {
        "stopwords_path": _scalar(args.stopwords, file_values, "stopwords", None),
        "lexicon_path": _scalar(args.lexicon, file_values, "lexicon", None),
        "negators_path": _scalar(args.negators, file_values, "negators", None),
        "thesaurus_path": _scalar(args.thesaurus, file_values, "thesaurus", None),
    }

    corpus = filter_users(load_corpus(corpus_path))
    resources = load_resources(**resource_paths)
    configs = expand_grid(grid)
    tasks = [(cfg_values, models) for cfg_values in configs]
    print(f"{len(configs)} configuration(s) x {len(models)} model(s) = {len(tasks) * len(models)} runs")

    jobs = int(_scalar(args.jobs, file_values, "jobs", 0)) or (os.cpu_count() or 1)
    jobs = max(1, min(jobs, len(tasks)))
    rows: list[ExperimentRow] = []
    if jobs == 1:
        runner = Runner(corpus, resources, settings)
        for task in tasks:
            rows.extend(runner.run_config(*task))
    else:
        with ProcessPoolExecutor(
            max_workers=jobs,
            initializer=_worker_init,
            initargs=(corpus_path, resource_paths, settings),
        ) as pool:
            for result in pool.map(_worker_run, tasks):
                rows.extend(result)

    ordered = write_csv(rows, out_dir / "results.csv")
    for i, row in enumerate(ordered):
        if row.status == "ok" and row.report is not None:
            write_roc_tsv(row.report.roc_points, out_dir / "roc" / f"{run_id(i, row.model)}.tsv")
    write_summary(ordered, out_dir / "summary.txt")
    if args.figures:
        from .plots import render_report_figures

        render_report_figures(ordered, out_dir / "figures")

    failed = [r for r in ordered if r.status != "ok"]
    print(f"wrote {out_dir / 'results.csv'} ({len(ordered)} rows, {len(failed)} failed)")
    return 1 if failed else 0


@dataclass(frozen=True)
class _RowMetrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    auc: float
    roc_points: tuple = ()


def _read_rows(results_path) -> list[ExperimentRow]:
    rows = []
    with open(results_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{results_path}: missing columns {sorted(missing)}")
        for rec in reader:
            config = {c: rec[c] for c in CONFIG_COLUMNS}
            if rec["status"] == "ok":
                report = _RowMetrics(
                    accuracy=float(rec["accuracy"]),
                    precision=float(rec["precision"]),
                    recall=float(rec["recall"]),
                    f1=float(rec["f1"]),
                    auc=float(rec["auc"]),
                )
            else:
                report = None
            rows.append(
                ExperimentRow(
                    config=config,
                    model=rec["model"],
                    status=rec["status"],
                    message=rec.get("message", ""),
                    report=report,
                )
            )
    return rows


def _attach_roc(rows, roc_dir: Path) -> list[ExperimentRow]:
    out = []
    for i, row in enumerate(rows):
        if row.report is None:
            out.append(row)
            continue
        points: tuple = ()
        tsv = roc_dir / f"{run_id(i, row.model)}.tsv"
        if tsv.exists():
            with tsv.open(encoding="utf-8") as fh:
                next(fh)
                points = tuple(
                    (float(a), float(b))
                    for a, b in (line.split("\t") for line in fh if line.strip())
                )
        report = _RowMetrics(
            accuracy=row.report.accuracy,
            precision=row.report.precision,
            recall=row.report.recall,
            f1=row.report.f1,
            auc=row.report.auc,
            roc_points=points,
        )
        out.append(
            ExperimentRow(
                config=row.config, model=row.model, status=row.status,
                message=row.message, report=report,
            )
        )
    return out


def cmd_report(args) -> int:
    results_path = Path(args.results)
    out_dir = Path(args.out) if args.out else results_path.parent
    rows = sort_rows(_read_rows(results_path))
    if not rows:
        raise ValueError("results file has no rows")
    rows = _attach_roc(rows, results_path.parent / "roc")
    write_summary(rows, out_dir / "summary.txt")
    if args.figures:
        from .plots import render_report_figures

        render_report_figures(rows, out_dir / "figures")
    print(f"wrote {out_dir / 'summary.txt'}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_report(args)
    except (ToolkitError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
