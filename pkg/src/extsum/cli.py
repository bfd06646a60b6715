"""Batch command-line interface.

Commands: prepare, train, summarize, evaluate, compare, gen-synth,
grad-check.  Options resolve as builtin defaults < [global] config section
< [command] config section < explicit CLI flags.  Exit codes: 0 success,
2 config error, 3 data error, 4 numeric failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import pipeline
from .embed import feature_dim
from .errors import ConfigError, DataError, ExtsumError, NumericError
from .evaluation import ReportRow, evaluate_corpus, format_table, format_tsv
from .models.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .models.gradcheck import grad_check
from .models.train import DocSample, ModelSpec, TrainConfig, train
from .plots import save_loss_curve, save_metric_bars
from .synthetic import PROFILES, generate_corpus

log = logging.getLogger("extsum")

GLOBAL_KEYS = ("seed", "out_dir", "quiet")

DEFAULTS: dict[str, dict] = {
    "gen-synth": {"profile": "scattered", "docs": 200, "seed": 0, "out_dir": "out"},
    "prepare": {
        "filter": "extractive",
        "dim": 256,
        "theta": 0.7,
        "split_ratio": 0.8,
        "embeddings": None,
        "summary_embeddings": None,
        "label_mode": "embedding",
        "seed": 0,
        "out_dir": "out",
    },
    "train": {
        "model": "logistic",
        "hidden": "50,50",
        "activation": "relu",
        "hidden_size": 50,
        "features": "full",
        "epochs": 50,
        "learning_rate": 1e-3,
        "optimizer": "adam",
        "beta1": 0.9,
        "beta2": 0.999,
        "adam_eps": 1e-8,
        "batch_docs": 16,
        "class_balance": True,
        "train_split": "train",
        "seed": 0,
        "out_dir": "out",
    },
    "summarize": {
        "method": "lede3",
        "checkpoint": None,
        "k": 3,
        "select": "topk",
        "tau": None,
        "split": "all",
        "seed": 0,
        "out_dir": "out",
    },
    "evaluate": {
        "method": "lede3",
        "checkpoint": None,
        "k": 3,
        "select": "topk",
        "tau": None,
        "split": "test",
        "seed": 0,
        "out_dir": "out",
    },
    "compare": {
        "models": ["lede3", "logistic", "ffnn", "lstm-bi"],
        "hidden": "50,50",
        "activation": "relu",
        "hidden_size": 50,
        "features": "full",
        "epochs": 50,
        "learning_rate": 1e-3,
        "optimizer": "adam",
        "beta1": 0.9,
        "beta2": 0.999,
        "adam_eps": 1e-8,
        "batch_docs": 16,
        "class_balance": True,
        "k": 3,
        "split": "test",
        "seed": 0,
        "out_dir": "out",
    },
    "grad-check": {"step": 1e-5, "seed": 0, "out_dir": "out"},
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extsum",
        description="Extractive news summarization: prepare, train, summarize, evaluate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    S = argparse.SUPPRESS

    def add_common(p):
        p.add_argument("--config", default=None, help="TOML config file")
        p.add_argument("--seed", type=int, default=S, help="run seed (default: 0)")
        p.add_argument("--out-dir", default=S, help="output directory (default: out)")
        p.add_argument("--quiet", action="store_true", default=S, help="log warnings only")

    p = sub.add_parser("gen-synth", help="generate a synthetic corpus")
    p.add_argument("--profile", choices=PROFILES, default=S,
                   help="lead_biased plants summaries at positions 0-2; "
                        "scattered plants them at random positions (default)")
    p.add_argument("--docs", type=int, default=S, help="document count (default: 200)")
    add_common(p)

    p = sub.add_parser("prepare", help="segment, embed, and label a corpus")
    p.add_argument("corpus", help="JSON-Lines corpus file")
    p.add_argument("--filter", default=S,
                   choices=["extractive", "mixed", "abstractive", "unknown"],
                   help="density bin to keep; 'unknown' disables filtering "
                        "(default: extractive)")
    p.add_argument("--dim", type=int, default=S,
                   help="built-in embedding dimension (default: 256)")
    p.add_argument("--theta", type=float, default=S,
                   help="labeling similarity threshold (default: 0.7)")
    p.add_argument("--split-ratio", type=float, default=S,
                   help="train fraction of documents (default: 0.8)")
    p.add_argument("--embeddings", default=S,
                   help="external article-sentence embedding file (.xsem)")
    p.add_argument("--summary-embeddings", default=S,
                   help="external summary-sentence embedding file (.xsem)")
    p.add_argument("--label-mode", choices=pipeline.LABEL_MODES, default=S,
                   help="label against feature embeddings or built-in TF-IDF "
                        "vectors (default: embedding)")
    add_common(p)

    def add_train_opts(p):
        p.add_argument("--hidden", default=S,
                       help="ffnn hidden widths, comma-separated (default: 50,50)")
        p.add_argument("--activation", choices=["relu", "tanh"], default=S,
                       help="ffnn hidden activation (default: relu)")
        p.add_argument("--hidden-size", type=int, default=S,
                       help="lstm hidden size per direction (default: 50)")
        p.add_argument("--features", choices=["full", "embedding-only"], default=S,
                       help="feature layout (default: full)")
        p.add_argument("--epochs", type=int, default=S, help="default: 50")
        p.add_argument("--learning-rate", type=float, default=S, help="default: 1e-3")
        p.add_argument("--optimizer", choices=["adam", "sgd"], default=S,
                       help="default: adam")
        p.add_argument("--beta1", type=float, default=S)
        p.add_argument("--beta2", type=float, default=S)
        p.add_argument("--adam-eps", type=float, default=S)
        p.add_argument("--batch-docs", type=int, default=S,
                       help="documents per optimizer step (default: 16)")
        p.add_argument("--class-balance", action=argparse.BooleanOptionalAction,
                       default=S, help="class-weighted BCE (default: on)")

    p = sub.add_parser("train", help="train a sentence classifier")
    p.add_argument("--prepared", required=True, help="prepared directory")
    p.add_argument("--model", choices=["logistic", "ffnn", "lstm-uni", "lstm-bi"],
                   default=S, help="default: logistic")
    add_train_opts(p)
    p.add_argument("--train-split", choices=["train", "all"], default=S,
                   help="documents to train on (default: train)")
    add_common(p)

    def add_select_opts(p):
        p.add_argument("--k", type=int, default=S,
                       help="sentences per summary in topk mode (default: 3)")
        p.add_argument("--select", choices=["topk", "threshold"], default=S,
                       help="selection rule (default: topk)")
        p.add_argument("--tau", type=float, default=S,
                       help="threshold-mode score cutoff")

    p = sub.add_parser("summarize", help="write summaries for prepared documents")
    p.add_argument("--prepared", required=True)
    p.add_argument("--method", choices=["lede3", "model"], default=S,
                   help="default: lede3")
    p.add_argument("--checkpoint", default=S, help="required for --method model")
    add_select_opts(p)
    p.add_argument("--split", choices=["train", "test", "all"], default=S,
                   help="default: all")
    add_common(p)

    p = sub.add_parser("evaluate", help="score one method against gold labels")
    p.add_argument("--prepared", required=True)
    p.add_argument("--method", choices=["lede3", "model"], default=S,
                   help="default: lede3")
    p.add_argument("--checkpoint", default=S, help="required for --method model")
    add_select_opts(p)
    p.add_argument("--split", choices=["train", "test", "all"], default=S,
                   help="default: test")
    add_common(p)

    p = sub.add_parser("compare", help="train and score several models side by side")
    p.add_argument("--prepared", required=True)
    p.add_argument("--models", nargs="+", default=S,
                   choices=["lede3", "logistic", "ffnn", "lstm-uni", "lstm-bi"],
                   help="row order follows this list; a LEDE3 row is always included")
    add_train_opts(p)
    p.add_argument("--k", type=int, default=S,
                   help="sentences per summary (default: 3)")
    p.add_argument("--split", choices=["train", "test", "all"], default=S,
                   help="evaluation split (default: test)")
    add_common(p)

    p = sub.add_parser("grad-check", help="verify analytic gradients numerically")
    p.add_argument("--step", type=float, default=S,
                   help="central-difference step (default: 1e-5)")
    add_common(p)

    return parser


def load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    file = Path(path)
    if not file.exists():
        raise ConfigError(f"config file not found: {file}")
    try:
        with file.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"bad config file {file}: {exc}") from exc


def resolve_options(command: str, args: argparse.Namespace) -> dict:
    """Merge builtin defaults, config file sections, and explicit flags."""
    given = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    config = load_config_file(getattr(args, "config", None))
    options = dict(DEFAULTS[command])
    options.setdefault("quiet", False)

    global_section = config.get("global", {})
    for key, value in global_section.items():
        if key not in GLOBAL_KEYS:
            raise ConfigError(f"[global] has unknown key {key!r}")
        if key in options:
            options[key] = value
    section = config.get(command, {})
    for key, value in section.items():
        if key not in options:
            raise ConfigError(f"[{command}] has unknown key {key!r}")
        options[key] = value
    options.update(given)
    return options


def write_run_config(options: dict, out_dir: Path, command: str) -> None:
    payload = {"command": command, "options": {k: v for k, v in sorted(options.items())}}
    (out_dir / "run_config.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2, default=str), encoding="utf-8"
    )


def parse_hidden(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(v) for v in text)
    try:
        widths = tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad --hidden value {text!r}: {exc}") from exc
    if not widths or any(w < 1 for w in widths):
        raise ConfigError(f"--hidden needs positive widths, got {text!r}")
    return widths


def model_label(kind: str, options: dict) -> str:
    """Row names in the style of the experiment tables."""
    if kind == "lede3":
        return "LEDE3"
    if kind == "logistic":
        label = "Logistic Reg"
    elif kind == "ffnn":
        widths = " ".join(str(w) for w in parse_hidden(options["hidden"]))
        label = f"NN {widths}"
    else:
        direction = "Bi" if kind == "lstm-bi" else "Uni"
        label = f"LSTM {direction} {options['hidden_size']}"
    if options.get("class_balance", True) and kind != "logistic":
        label += " Bal"
    return label


def make_train_config(options: dict) -> TrainConfig:
    return TrainConfig(
        epochs=options["epochs"],
        learning_rate=options["learning_rate"],
        optimizer=options["optimizer"],
        beta1=options["beta1"],
        beta2=options["beta2"],
        eps=options["adam_eps"],
        class_balance=options["class_balance"],
        batch_docs=options["batch_docs"],
        seed=options["seed"],
    )


def make_model_spec(kind: str, input_dim: int, options: dict) -> ModelSpec:
    return ModelSpec(
        kind=kind,
        input_dim=input_dim,
        hidden=parse_hidden(options["hidden"]) if "hidden" in options else (50, 50),
        activation=options.get("activation", "relu"),
        hidden_size=options.get("hidden_size", 50),
    )


def train_one(
    kind: str, prepared: pipeline.PreparedCorpus, options: dict, split: str
):
    pos = pipeline.fit_position_stats(prepared)
    mode = options["features"]
    samples = pipeline.build_doc_samples(
        prepared, pos, feature_mode=mode, split=None if split == "all" else split
    )
    if not samples:
        raise DataError(f"no documents in split {split!r} to train on")
    spec = make_model_spec(kind, feature_dim(prepared.dim, mode), options)
    cfg = make_train_config(options)
    params, report = train(spec, samples, cfg)
    ckpt = Checkpoint(
        spec=spec,
        params=params,
        features={
            "mode": mode,
            "dim": prepared.dim,
            "pos_mean": pos.mean,
            "pos_std": pos.std,
        },
        labeling={
            "theta": prepared.stats["config"]["theta"],
            "label_mode": prepared.stats["config"]["label_mode"],
        },
        idf_sha256=prepared.idf_sha256,
        train_config=cfg.as_dict(),
    )
    return ckpt, report


def _split_arg(value: str):
    return None if value == "all" else value


def cmd_gen_synth(options: dict) -> int:
    out_dir = Path(options["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    records = generate_corpus(options["profile"], options["docs"], options["seed"])
    corpus_file = out_dir / "corpus.jsonl"
    with corpus_file.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
    write_run_config(options, out_dir, "gen-synth")
    log.info("wrote %d %s documents to %s", len(records), options["profile"], corpus_file)
    return 0


def cmd_prepare(options: dict) -> int:
    out_dir = Path(options["out_dir"])
    density = options["filter"]
    stats = pipeline.run_prepare(
        corpus_path=options["corpus"],
        out_dir=out_dir,
        density_filter=None if density == "unknown" else density,
        dim=options["dim"],
        theta=options["theta"],
        split_ratio=options["split_ratio"],
        seed=options["seed"],
        embeddings_path=options["embeddings"],
        summary_embeddings_path=options["summary_embeddings"],
        label_mode=options["label_mode"],
    )
    write_run_config(options, out_dir, "prepare")
    log.info(
        "prepared %d docs (%d sentences, positive rate %.3f) into %s",
        stats["n_docs"],
        stats["sentences"]["total"],
        stats["labels"]["positive_rate"],
        out_dir,
    )
    return 0


def cmd_train(options: dict) -> int:
    prepared = pipeline.load_prepared(options["prepared"])
    out_dir = Path(options["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    kind = options["model"]
    ckpt, report = train_one(kind, prepared, options, options["train_split"])
    ckpt_path = out_dir / f"{kind}.ckpt"
    save_checkpoint(ckpt, ckpt_path)
    (out_dir / "train_report.json").write_text(
        json.dumps(
            {
                "model": model_label(kind, options),
                "kind": kind,
                "epoch_losses": report.epoch_losses,
                "params_checksum": report.params_checksum,
                "checkpoint": ckpt_path.name,
            },
            sort_keys=True,
            indent=2,
        ),
        encoding="utf-8",
    )
    save_loss_curve(
        report.epoch_losses, out_dir / "loss_curve.png", model_label(kind, options)
    )
    write_run_config(options, out_dir, "train")
    log.info(
        "trained %s in %.1fs; final epoch loss %.4f; checkpoint %s (sha256 %s)",
        kind,
        report.wall_time,
        report.epoch_losses[-1],
        ckpt_path,
        report.params_checksum[:12],
    )
    return 0


def _checkpoint_for(options: dict) -> Checkpoint:
    if options.get("checkpoint") is None:
        raise ConfigError("--method model needs --checkpoint")
    return load_checkpoint(options["checkpoint"])


def cmd_summarize(options: dict) -> int:
    prepared = pipeline.load_prepared(options["prepared"])
    out_dir = Path(options["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    split = _split_arg(options["split"])
    if options["method"] == "lede3":
        results = pipeline.lede3_summaries(prepared, split)
    else:
        ckpt = _checkpoint_for(options)
        pipeline.validate_checkpoint(ckpt, prepared)
        results = pipeline.model_summaries(
            ckpt, prepared, split, k=options["k"], mode=options["select"],
            tau=options["tau"],
        )
    rendered = pipeline.rendered_summaries(results, prepared)
    with (out_dir / "summaries.jsonl").open("w", encoding="utf-8") as fh:
        for res in results:
            fh.write(
                json.dumps(
                    {
                        "doc_id": res.doc_id,
                        "method": res.method,
                        "selected": res.selected,
                        "scores": res.scores,
                        "summary": rendered[res.doc_id],
                    },
                    sort_keys=True,
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
    write_run_config(options, out_dir, "summarize")
    log.info("wrote %d summaries to %s", len(results), out_dir / "summaries.jsonl")
    return 0


def _evaluate_method(
    prepared, options, kind: str, ckpt: Checkpoint | None, split
) -> ReportRow:
    if kind == "lede3":
        results = pipeline.lede3_summaries(prepared, split)
        predictions = pipeline.selection_predictions(results, prepared)
        label = "LEDE3"
    else:
        predictions = pipeline.probability_predictions(ckpt, prepared, split)
        results = pipeline.model_summaries(
            ckpt, prepared, split, k=options.get("k", 3),
            mode=options.get("select", "topk"), tau=options.get("tau"),
        )
        label = model_label(kind, options)
    report = evaluate_corpus(
        predictions,
        pipeline.gold_labels(prepared, split),
        pipeline.rendered_summaries(results, prepared),
        pipeline.reference_summaries(prepared, split),
    )
    return ReportRow(model=label, report=report)


def _write_report(rows, out_dir: Path, options: dict, command: str, extra: dict) -> None:
    payload = {
        "rows": [
            {"model": row.model, **row.report.as_dict()} for row in rows
        ],
        **extra,
    }
    (out_dir / "report.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2), encoding="utf-8"
    )
    table = format_table(rows)
    (out_dir / "table.txt").write_text(table, encoding="utf-8")
    (out_dir / "table.tsv").write_text(format_tsv(rows), encoding="utf-8")
    save_metric_bars(rows, out_dir / "metrics.png", command)
    write_run_config(options, out_dir, command)
    if not options.get("quiet"):
        print(table, end="")


def cmd_evaluate(options: dict) -> int:
    prepared = pipeline.load_prepared(options["prepared"])
    out_dir = Path(options["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    split = _split_arg(options["split"])
    if options["method"] == "lede3":
        row = _evaluate_method(prepared, options, "lede3", None, split)
    else:
        ckpt = _checkpoint_for(options)
        pipeline.validate_checkpoint(ckpt, prepared)
        row = _evaluate_method(prepared, options, ckpt.spec.kind, ckpt, split)
    _write_report(
        [row], out_dir, options, "evaluate",
        {"split": options["split"], "n_docs": row.report.n_docs},
    )
    return 0


def cmd_compare(options: dict) -> int:
    prepared = pipeline.load_prepared(options["prepared"])
    out_dir = Path(options["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    split = _split_arg(options["split"])
    models = list(options["models"])
    if "lede3" not in models:
        models.insert(0, "lede3")
    rows = []
    for kind in models:
        if kind == "lede3":
            rows.append(_evaluate_method(prepared, options, "lede3", None, split))
            continue
        ckpt, report = train_one(kind, prepared, options, "train")
        ckpt_path = out_dir / f"{kind}.ckpt"
        save_checkpoint(ckpt, ckpt_path)
        save_loss_curve(
            report.epoch_losses,
            out_dir / f"loss_{kind}.png",
            model_label(kind, options),
        )
        log.info(
            "trained %s (final loss %.4f, %.1fs)",
            kind, report.epoch_losses[-1], report.wall_time,
        )
        rows.append(_evaluate_method(prepared, options, kind, ckpt, split))
    _write_report(
        rows, out_dir, options, "compare",
        {"split": options["split"], "models": models},
    )
    return 0


def cmd_grad_check(options: dict) -> int:
    from .models.gradcheck import relu_kink_clearance
    from .models.train import init_params

    rng = np.random.default_rng(options["seed"])
    step = options["step"]
    suites = [
        ("logistic", ModelSpec(kind="logistic", input_dim=7), 1e-6),
        (
            "ffnn relu",
            ModelSpec(kind="ffnn", input_dim=6, hidden=(5, 4), activation="relu"),
            1e-5,
        ),
        (
            "ffnn tanh",
            ModelSpec(kind="ffnn", input_dim=6, hidden=(5, 4), activation="tanh"),
            1e-5,
        ),
        ("lstm-uni", ModelSpec(kind="lstm-uni", input_dim=5, hidden_size=4), 1e-4),
        ("lstm-bi", ModelSpec(kind="lstm-bi", input_dim=5, hidden_size=4), 1e-4),
    ]
    lines = []
    results = []
    failed = False
    for name, spec, tolerance in suites:
        # Redraw relu cases whose pre-activations sit near the kink, where
        # central differences do not estimate the one-sided derivative.
        while True:
            params = init_params(spec, rng)
            docs = []
            for i in range(2):
                steps = int(rng.integers(2, 5))
                docs.append(
                    DocSample(
                        doc_id=f"gc-{i}",
                        X=rng.normal(size=(steps, spec.input_dim)),
                        y=rng.integers(0, 2, size=steps).astype(np.float64),
                    )
                )
            if relu_kink_clearance(spec, params, docs) > 100.0 * step:
                break
        error = grad_check(spec, params, docs, step=step)
        ok = bool(error < tolerance)
        failed = failed or not ok
        lines.append(
            f"{name:<10}  max rel err {error:.3e}  tolerance {tolerance:.0e}  "
            f"{'PASS' if ok else 'FAIL'}"
        )
        results.append(
            {"model": name, "max_rel_error": error, "tolerance": tolerance, "pass": ok}
        )
    out_dir = Path(options["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "gradcheck.json").write_text(
        json.dumps({"step": step, "results": results}, sort_keys=True, indent=2),
        encoding="utf-8",
    )
    write_run_config(options, out_dir, "grad-check")
    if not options.get("quiet"):
        print("\n".join(lines))
    if failed:
        raise NumericError("gradient check failed; see gradcheck.json")
    return 0


COMMANDS = {
    "gen-synth": cmd_gen_synth,
    "prepare": cmd_prepare,
    "train": cmd_train,
    "summarize": cmd_summarize,
    "evaluate": cmd_evaluate,
    "compare": cmd_compare,
    "grad-check": cmd_grad_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = resolve_options(args.command, args)
    except ExtsumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    logging.basicConfig(
        level=logging.WARNING if options.get("quiet") else logging.INFO,
        format="%(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](options)
    except ExtsumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
