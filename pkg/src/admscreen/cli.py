"""Batch command-line front end for scripted, reproducible runs.

Exit codes: 0 success, 1 expected domain errors, 2 usage errors. All
diagnostics go to stderr; data goes to stdout or to files written
atomically (temp file + rename), so a failed run never leaves a partial
output file behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import synthdata
from .classify import load_model, save_model, screen_batch, train_baseline
from .corpus import (
    DocumentSource,
    atomic_write_text,
    class_distribution,
    load_corpus,
    save_corpus,
    stratified_split,
)
from .errors import EmptyDocumentError, ScreeningError
from .ingest import (
    DEFAULT_INCLUDE_KEYWORDS,
    SourceConfig,
    deduplicate,
    fetch_news_feed,
    filter_by_keywords,
    parse_social_export,
)
from .metrics import (
    REPORT_FORMATS,
    ConfusionMatrix3,
    RunMetadata,
    render_report,
    report_from_matrix,
)
from .service import evaluate_fragments
from .textprep import clean_document, segment_fragments

DEFAULT_FRACTION = 0.3578
DEFAULT_ALPHA = 1.0


def fraction_arg(value: str) -> float:
    try:
        fraction = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}")
    if not 0 < fraction < 1:
        raise argparse.ArgumentTypeError(f"fraction must be in (0, 1), got {value}")
    return fraction


def positive_float(value: str) -> float:
    number = float(value)
    if number <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return number


def _emit(data: str, out: str | None) -> None:
    if out:
        atomic_write_text(Path(out), data)
    else:
        sys.stdout.write(data)


def _emit_bytes(data: bytes, out: str | None) -> None:
    _emit(data.decode("utf-8"), out)


def cmd_ingest(args) -> int:
    kind = DocumentSource(args.kind)
    config = SourceConfig(
        kind=kind,
        location=args.source,
        max_items=args.max_items,
        text_field=args.text_field,
        timestamp_field=args.timestamp_field,
    )
    if kind is DocumentSource.NEWS_FEED:
        documents = fetch_news_feed(config)
        skipped = 0
    else:
        result = parse_social_export(config)
        documents = list(result.documents)
        skipped = result.skipped
    if args.keywords is not None:
        keywords = (
            list(DEFAULT_INCLUDE_KEYWORDS)
            if args.keywords == "default"
            else [k for k in args.keywords.split(",") if k]
        )
        documents = filter_by_keywords(documents, keywords)
    if args.dedupe:
        documents = deduplicate(documents)
    save_corpus(documents, [], args.out)
    print(f"ingested {len(documents)} documents (skipped {skipped}) -> {args.out}", file=sys.stderr)
    return 0


def cmd_prep(args) -> int:
    documents, _ = load_corpus(args.input)
    cleaned_docs = []
    fragments = []
    dropped = 0
    for document in documents:
        try:
            cleaned = clean_document(document)
        except EmptyDocumentError:
            dropped += 1
            continue
        cleaned_docs.append(cleaned)
        fragments.extend(segment_fragments(cleaned))
    save_corpus(cleaned_docs, fragments, args.out)
    print(
        f"prepared {len(cleaned_docs)} documents, {len(fragments)} fragments "
        f"(dropped {dropped} empty) -> {args.out}",
        file=sys.stderr,
    )
    return 0


def cmd_split(args) -> int:
    _, fragments = load_corpus(args.dataset)
    split = stratified_split(fragments, args.fraction, args.seed)
    payload = {
        "dataset": str(args.dataset),
        "fraction": args.fraction,
        "seed": args.seed,
        "train_ids": sorted(split.train_ids),
        "test_ids": sorted(split.test_ids),
    }
    _emit(json.dumps(payload, ensure_ascii=False, indent=2) + "\n", args.out)
    return 0


def cmd_train(args) -> int:
    _, fragments = load_corpus(args.dataset)
    labeled = [f for f in fragments if f.label is not None]
    model = train_baseline(labeled, args.alpha)
    save_model(model, args.out)
    print(
        f"trained on {len(labeled)} labeled fragments, vocabulary {len(model.vocabulary)} "
        f"-> {args.out}",
        file=sys.stderr,
    )
    return 0


def _classifier_descriptor(args) -> dict:
    if args.classifier == "remote":
        endpoint = args.endpoint or os.environ.get("ADMSCREEN_REMOTE_ENDPOINT")
        if not endpoint:
            raise ScreeningError(
                "remote classifier needs --endpoint or ADMSCREEN_REMOTE_ENDPOINT"
            )
        return {
            "kind": "remote",
            "endpoint": endpoint,
            "model_name": args.model_name
            or os.environ.get("ADMSCREEN_REMOTE_MODEL", "default"),
        }
    return {"kind": "baseline", "alpha": args.alpha}


def cmd_eval(args) -> int:
    _, fragments = load_corpus(args.dataset)
    report, _, errors = evaluate_fragments(
        fragments,
        _classifier_descriptor(args),
        args.fraction,
        args.seed,
        dataset_id=str(args.dataset),
    )
    if errors:
        print(f"warning: {len(errors)} fragments failed classification", file=sys.stderr)
    _emit_bytes(render_report(report, args.format), args.out)
    return 0


def cmd_screen(args) -> int:
    _, fragments = load_corpus(args.dataset)
    if args.model:
        model = load_model(args.model)
    else:
        labeled = [f for f in fragments if f.label is not None]
        model = train_baseline(labeled, args.alpha)
    result = screen_batch(model, fragments)
    lines = []
    for item in result.items:
        lines.append(
            json.dumps(
                {
                    "fragment_id": item.fragment.id,
                    "text": item.fragment.text,
                    "prediction": item.prediction.to_dict() if item.prediction else None,
                    "flagged": item.flagged,
                    "error": item.error,
                },
                ensure_ascii=False,
            )
        )
    _emit("".join(line + "\n" for line in lines), args.out)
    print(
        f"screened {len(result.items)} fragments, flagged {len(result.flagged)}",
        file=sys.stderr,
    )
    return 0


def cmd_report(args) -> int:
    with open(args.run, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    matrix = ConfusionMatrix3.from_rows(data["matrix"]["counts"])
    meta = data["metadata"]
    metadata = RunMetadata(
        classifier_id=meta["classifier_id"],
        dataset_id=meta["dataset_id"],
        timestamp=meta["timestamp"],
        seed=meta.get("seed"),
        fraction=meta.get("fraction"),
    )
    _emit_bytes(render_report(report_from_matrix(matrix, metadata), args.format), args.out)
    return 0


def cmd_distribution(args) -> int:
    _, fragments = load_corpus(args.dataset)
    dist = class_distribution(fragments)
    payload = {
        "counts": {label.value: dist.counts[label] for label in dist.counts},
        "total": dist.total,
        "unlabeled": dist.unlabeled,
    }
    _emit(json.dumps(payload, indent=2) + "\n", args.out)
    return 0


def cmd_synth(args) -> int:
    synthdata.write_synthetic_corpus(args.out, seed=args.seed)
    print(f"synthetic corpus -> {args.out}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ScreeningService
    from .store import EventStore
    from .webapp import create_app

    service = ScreeningService(store=EventStore(args.state_dir))
    if args.dataset:
        summary = service.load_dataset(args.dataset)
        print(f"loaded dataset: {summary}", file=sys.stderr)
    app = create_app(
        service,
        token=args.token or os.environ.get("ADMSCREEN_TOKEN"),
        static_dir=args.static_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="admscreen",
        description="Adverse-media screening pipeline (English/Bangla).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="fetch a news feed or parse a social export")
    p.add_argument("--source", required=True, help="feed URL/path or export file path")
    p.add_argument("--kind", required=True, choices=["news_feed", "social_export"])
    p.add_argument("--out", required=True)
    p.add_argument("--max-items", type=int, default=None)
    p.add_argument("--text-field", default="text")
    p.add_argument("--timestamp-field", default="created_at")
    p.add_argument(
        "--keywords",
        default=None,
        help="comma-separated include keywords, or 'default' for the built-in MFS list",
    )
    p.add_argument("--dedupe", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("prep", help="clean and segment documents into fragments")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("split", help="stratified train/test split of labeled fragments")
    p.add_argument("--dataset", required=True)
    p.add_argument("--fraction", type=fraction_arg, default=DEFAULT_FRACTION)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("train", help="train the baseline classifier")
    p.add_argument("--dataset", required=True)
    p.add_argument("--alpha", type=positive_float, default=DEFAULT_ALPHA)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="split, train, and evaluate on the test set")
    p.add_argument("--dataset", required=True)
    p.add_argument("--fraction", type=fraction_arg, default=DEFAULT_FRACTION)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--alpha", type=positive_float, default=DEFAULT_ALPHA)
    p.add_argument("--classifier", choices=["baseline", "remote"], default="baseline")
    p.add_argument("--endpoint", default=None)
    p.add_argument("--model-name", default=None)
    p.add_argument("--format", choices=list(REPORT_FORMATS), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("screen", help="classify fragments and flag negatives")
    p.add_argument("--dataset", required=True)
    p.add_argument("--model", default=None, help="model file from `train`")
    p.add_argument("--alpha", type=positive_float, default=DEFAULT_ALPHA)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_screen)

    p = sub.add_parser("report", help="re-render a JSON eval report")
    p.add_argument("--run", required=True, help="JSON report produced by eval")
    p.add_argument("--format", choices=list(REPORT_FORMATS), default="text-table")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("distribution", help="class distribution of a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("synth", help="write the synthetic evaluation corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--state-dir", required=True)
    p.add_argument("--dataset", default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static-dir", default=None)
    p.add_argument("--token", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScreeningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
