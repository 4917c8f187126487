"""Staged annotation pipeline: tokenize -> POS -> chunk -> NER.

Each stage consumes the previous stage's *predicted* labels as tag
features, mirroring how the three models are wired at inference time. The
result is a document of per-word records (word, pos, chunk, ner) with a
stable JSON rendering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .data import CHUNK_SCHEME, POS_SCHEME
from .model import SequenceLabelModel, load_model, save_model

Tokenizer = Callable[[str], list[list[str]]]

SENTENCE_FINAL = ".!?"


class AnnotationError(RuntimeError):
    pass


def default_tokenizer(text: str) -> list[list[str]]:
    """Whitespace word splitting with ./!/? sentence boundaries.

    A sentence-final punctuation mark becomes its own token. Text that has
    already been word-segmented (multi-syllable words joined by underscores)
    passes through unchanged. No characters are dropped: joining the output
    words reproduces the input minus whitespace.
    """
    sentences: list[list[str]] = []
    current: list[str] = []
    for raw in text.split():
        if len(raw) > 1 and raw[-1] in SENTENCE_FINAL:
            current.extend([raw[:-1], raw[-1]])
            sentences.append(current)
            current = []
        elif raw in tuple(SENTENCE_FINAL):
            current.append(raw)
            sentences.append(current)
            current = []
        else:
            current.append(raw)
    if current:
        sentences.append(current)
    return sentences


@dataclass
class WordRecord:
    word: str
    pos: str | None = None
    chunk: str | None = None
    ner: str | None = None


@dataclass
class AnnotatedDocument:
    sentences: list[list[WordRecord]]

    def label_sequences(self, task: str) -> list[list[str]]:
        return [[getattr(rec, task) for rec in sent] for sent in self.sentences]


@dataclass
class PipelineBundle:
    """The three staged models plus the tokenizer they share."""

    pos: SequenceLabelModel
    chunk: SequenceLabelModel
    ner: SequenceLabelModel
    tokenizer: Tokenizer | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.tokenizer is None:
            self.tokenizer = default_tokenizer
        for model, task in ((self.pos, "pos"), (self.chunk, "chunk"), (self.ner, "ner")):
            if model.task != task:
                raise AnnotationError(
                    f"bundle slot {task} holds a {model.task} model"
                )
        # downstream tag features must index the upstream label alphabets
        for model, sizes in (
            (self.chunk, (len(POS_SCHEME),)),
            (self.ner, (len(POS_SCHEME), len(CHUNK_SCHEME))),
        ):
            actual = tuple(t.data.shape[0] for t in model.encoder.tag_tables)
            if actual != sizes:
                raise AnnotationError(
                    f"{model.task} model tag tables {actual} do not match the "
                    f"upstream label alphabets {sizes}"
                )


def annotate(text: str, bundle: PipelineBundle) -> AnnotatedDocument:
    """Run the full pipeline over raw text; empty input gives an empty doc."""
    if not text or not text.strip():
        return AnnotatedDocument([])
    try:
        sentences = bundle.tokenizer(text)
    except Exception as exc:
        raise AnnotationError(f"tokenizer failed: {exc}") from exc
    doc: list[list[WordRecord]] = []
    for words in sentences:
        if not words:
            continue
        pos = bundle.pos.predict(words, [])
        chunk = bundle.chunk.predict(words, [pos])
        ner = bundle.ner.predict(words, [pos, chunk])
        doc.append(
            [WordRecord(w, p, c, n) for w, p, c, n in zip(words, pos, chunk, ner)]
        )
    return AnnotatedDocument(doc)


def to_json(doc: AnnotatedDocument) -> bytes:
    """UTF-8 JSON bytes with fixed key order; stable across runs."""
    sentences = []
    for sent in doc.sentences:
        rendered = []
        for rec in sent:
            if rec.pos is None or rec.chunk is None or rec.ner is None:
                raise ValueError(f"word {rec.word!r} is not fully annotated")
            rendered.append(
                {"word": rec.word, "pos": rec.pos, "chunk": rec.chunk, "ner": rec.ner}
            )
        sentences.append(rendered)
    return json.dumps({"sentences": sentences}, ensure_ascii=False).encode("utf-8")


def parse_document(blob: bytes) -> AnnotatedDocument:
    """Inverse of to_json."""
    payload = json.loads(blob.decode("utf-8"))
    return AnnotatedDocument(
        [
            [WordRecord(r["word"], r["pos"], r["chunk"], r["ner"]) for r in sent]
            for sent in payload["sentences"]
        ]
    )


BUNDLE_FILES = {"pos": "pos.model", "chunk": "chunk.model", "ner": "ner.model"}


def save_bundle(bundle: PipelineBundle, directory):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for task, name in BUNDLE_FILES.items():
        save_model(getattr(bundle, task), directory / name)
    (directory / "bundle.json").write_text(
        json.dumps({"meta": bundle.meta}, ensure_ascii=False), encoding="utf-8"
    )


def load_bundle(directory, tokenizer=None) -> PipelineBundle:
    directory = Path(directory)
    models = {}
    for task, name in BUNDLE_FILES.items():
        path = directory / name
        if not path.exists():
            raise AnnotationError(f"bundle is missing {name}")
        models[task] = load_model(path, expect_task=task)
    meta = {}
    meta_path = directory / "bundle.json"
    if meta_path.exists():
        meta = json.loads(meta_path.read_text(encoding="utf-8")).get("meta", {})
    return PipelineBundle(tokenizer=tokenizer, meta=meta, **models)
