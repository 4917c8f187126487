"""seqlab command line interface.

Subcommands:

    train     fit one task's model on CoNLL data
    eval      score a model against a labeled test file
    tag       annotate raw text through the staged pipeline
    serve     run the HTTP annotation service
    split     shuffle a corpus into train/dev/test parts
    toy-data  materialize the synthetic corpus and embeddings

Set SEQLAB_LOG (DEBUG/INFO/WARNING/ERROR) to control log verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .data import (
    load_embeddings,
    read_conll,
    scheme_for_task,
    split_corpus,
    write_conll,
    TASKS,
)
from .evaluation import accuracy, evaluate_spans, format_report, round2
from .model import ArchitectureConfig, load_model, save_model
from .pipeline import annotate, load_bundle, to_json
from .training import TrainConfig, train

log = logging.getLogger("seqlab.cli")

TASK_COLUMNS = {"pos": 2, "chunk": 3, "ner": 4}


def _read_corpus(path, columns):
    with open(path, encoding="utf-8") as handle:
        return read_conll(handle, columns)


def _detect_columns(path) -> int:
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            fields = line.split()
            if fields:
                return len(fields)
    raise SystemExit(f"{path}: empty corpus")


def cmd_train(args):
    columns = TASK_COLUMNS[args.task]
    scheme = scheme_for_task(args.task)
    train_set = _read_corpus(args.train, columns)
    dev_set = _read_corpus(args.dev, columns)
    with open(args.embeddings, encoding="utf-8") as handle:
        embeddings = load_embeddings(handle)
    config = TrainConfig(
        learning_rate=args.lr,
        lr_decay=args.lr_decay,
        gradient_clip=args.clip,
        max_epochs=args.max_epochs,
        patience=args.patience,
        seed=args.seed,
        dropout=args.dropout,
    )
    arch = ArchitectureConfig(
        char_dim=args.char_dim,
        window=args.window,
        filters=args.filters,
        hidden=args.hidden,
        dropout=args.dropout,
        iob2_constrained=not args.no_iob2_constraints,
    )
    model, history = train(train_set, dev_set, embeddings, scheme, config, arch)
    save_model(model, args.out)
    best = max(h.dev_metric for h in history)
    print(f"trained {args.task} model: {len(history)} epochs, best dev {round2(best)}")
    print(f"saved to {args.out}")


def cmd_eval(args):
    model = load_model(args.model, expect_task=args.task)
    columns = TASK_COLUMNS[args.task]
    test_set = _read_corpus(args.test, columns)
    gold = [s.labels(args.task) for s in test_set]
    pred = [
        model.predict(s.words(), [s.labels(t) for t in model.upstream_tasks])
        for s in test_set
    ]
    if model.scheme.is_span_task:
        report = evaluate_spans(gold, pred, model.scheme)
        print(format_report(report))
        payload = {
            "task": args.task,
            "precision": round2(report.overall.precision),
            "recall": round2(report.overall.recall),
            "f1": round2(report.overall.f1),
            "accuracy": round2(report.accuracy),
            "per_label": {
                lab: {
                    "precision": round2(c.precision),
                    "recall": round2(c.recall),
                    "f1": round2(c.f1),
                    "gold": c.gold,
                    "predicted": c.predicted,
                    "correct": c.correct,
                }
                for lab, c in report.per_label.items()
            },
        }
    else:
        acc = accuracy(gold, pred)
        total = sum(len(g) for g in gold)
        print(f"processed {total} tokens; accuracy: {round2(acc):6.2f}%")
        payload = {"task": args.task, "accuracy": round2(acc), "tokens": total}
    if args.json:
        Path(args.json).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8"
        )
        print(f"wrote report to {args.json}")


def cmd_tag(args):
    bundle = load_bundle(args.bundle)
    if args.infile:
        text = Path(args.infile).read_text(encoding="utf-8")
    else:
        text = sys.stdin.read()
    doc = annotate(text, bundle)
    if args.format == "json":
        sys.stdout.buffer.write(to_json(doc))
        sys.stdout.buffer.write(b"\n")
    else:
        from .data import Sentence, Token

        sentences = [
            Sentence([Token(r.word, pos=r.pos, chunk=r.chunk, ner=r.ner) for r in sent])
            for sent in doc.sentences
        ]
        sys.stdout.write(write_conll(sentences, columns=4))


def cmd_serve(args):
    from .server import serve

    bundle = load_bundle(args.bundle)
    print(f"serving annotation API on {args.host}:{args.port}")
    serve(bundle, args.port, host=args.host, cors_origin=args.cors)


def cmd_split(args):
    columns = args.columns or _detect_columns(args.infile)
    sentences = _read_corpus(args.infile, columns)
    train_part, dev_part, test_part = split_corpus(sentences, args.seed)
    for name, part in (("train", train_part), ("dev", dev_part), ("test", test_part)):
        path = f"{args.out_prefix}.{name}"
        Path(path).write_text(write_conll(part, columns), encoding="utf-8")
        print(f"{path}: {len(part)} sentences")


def cmd_toy_data(args):
    from .toydata import make_toy_corpus, make_toy_embeddings

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train_set, dev_set = make_toy_corpus(args.seed)
    for task, columns in TASK_COLUMNS.items():
        for name, part in (("train", train_set), ("dev", dev_set)):
            path = out / f"{task}.{name}.conll"
            path.write_text(write_conll(part, columns), encoding="utf-8")
    table = make_toy_embeddings(dim=args.dim, seed=args.seed)
    words = table.vocabulary.non_reserved()
    lines = [f"{len(words)} {table.dim}"]
    for w in words:
        row = table.matrix[table.vocabulary.id(w)]
        lines.append(w + " " + " ".join(f"{v:.6f}" for v in row))
    (out / "embeddings.vec").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote toy corpus ({len(train_set)}+{len(dev_set)} sentences) and "
          f"{table.dim}-dim embeddings to {out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqlab",
        description="Vietnamese sequence labeling: POS tagging, chunking, NER",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train one task's model")
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--train", required=True, help="training CoNLL file")
    p.add_argument("--dev", required=True, help="development CoNLL file")
    p.add_argument("--embeddings", required=True, help="word2vec text embeddings")
    p.add_argument("--out", required=True, help="output model path")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--lr-decay", type=float, default=0.05)
    p.add_argument("--clip", type=float, default=5.0)
    p.add_argument("--max-epochs", type=int, default=100)
    p.add_argument("--patience", type=int, default=10)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--hidden", type=int, default=300)
    p.add_argument("--char-dim", type=int, default=30)
    p.add_argument("--filters", type=int, default=30)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--no-iob2-constraints", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a model on a test file")
    p.add_argument("--task", choices=TASKS, required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--json", help="also write a JSON report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tag", help="annotate raw text with a model bundle")
    p.add_argument("--bundle", required=True, help="directory with pos/chunk/ner models")
    p.add_argument("--in", dest="infile", help="input text file (default: stdin)")
    p.add_argument("--format", choices=("json", "conll"), default="json")
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("serve", help="run the HTTP annotation service")
    p.add_argument("--bundle", required=True)
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--cors", default="*", help="Access-Control-Allow-Origin value")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("split", help="shuffle-split a corpus 70/10/20")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-prefix", required=True)
    p.add_argument("--columns", type=int, choices=(2, 3, 4))
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("toy-data", help="write the synthetic corpus and embeddings")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dim", type=int, default=300, help="toy embedding width")
    p.set_defaults(func=cmd_toy_data)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("SEQLAB_LOG", "WARNING").upper(),
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
