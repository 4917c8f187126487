"""CoNLL corpora, label schemes, vocabularies and word embeddings.

Corpus files are UTF-8 text, one token per line, fields separated by runs of
spaces or tabs, sentences separated by blank lines. Column layouts:

    2 columns: word POS            (POS tagging corpus)
    3 columns: word POS chunk      (chunking corpus)
    4 columns: word POS chunk NER  (NER corpus)

Chunk and NER columns use IOB2 encoding. Multi-syllable Vietnamese words are
joined by underscores.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .rng import Rng

log = logging.getLogger("seqlab.data")

PAD = "<pad>"
UNK = "<unk>"
PAD_ID = 0
UNK_ID = 1


class DataError(ValueError):
    pass


class ConllFormatError(DataError):
    pass


class LabelSchemeError(DataError):
    pass


class EmbeddingFormatError(DataError):
    pass


# -- label schemes -----------------------------------------------------------

POS_TAGS = (
    "N", "V", "CH", "R", "E", "A", "P", "Np", "M", "C", "Nc",
    "L", "T", "Ny", "Nu", "X", "B", "S", "I", "Y", "Vy",
)
CHUNK_TYPES = ("NP", "VP", "PP", "AP", "QP", "RP")
NER_TYPES = ("PER", "LOC", "ORG", "MISC")

TASKS = ("pos", "chunk", "ner")


@dataclass(frozen=True)
class LabelScheme:
    """A task's closed label alphabet.

    For span tasks the encoded alphabet is O at index 0 followed by B-x, I-x
    pairs in base-label order; POS uses its base labels directly.
    """

    task: str
    base_labels: tuple[str, ...]
    encoded_labels: tuple[str, ...]
    _index: dict = field(repr=False, hash=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {lab: i for i, lab in enumerate(self.encoded_labels)}
        )

    @property
    def is_span_task(self) -> bool:
        return self.task != "pos"

    def __len__(self) -> int:
        return len(self.encoded_labels)

    def __contains__(self, label: str) -> bool:
        return label in self._index

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LabelSchemeError(
                f"label {label!r} is not in the {self.task} label scheme"
            ) from None

    def label(self, idx: int) -> str:
        return self.encoded_labels[idx]


def _span_scheme(task: str, types: tuple[str, ...]) -> LabelScheme:
    encoded = ["O"]
    for t in types:
        encoded += [f"B-{t}", f"I-{t}"]
    return LabelScheme(task, types, tuple(encoded))


POS_SCHEME = LabelScheme("pos", POS_TAGS, POS_TAGS)
CHUNK_SCHEME = _span_scheme("chunk", CHUNK_TYPES)
NER_SCHEME = _span_scheme("ner", NER_TYPES)

_SCHEMES = {"pos": POS_SCHEME, "chunk": CHUNK_SCHEME, "ner": NER_SCHEME}


def scheme_for_task(task: str) -> LabelScheme:
    try:
        return _SCHEMES[task]
    except KeyError:
        raise DataError(f"unknown task {task!r}; expected one of {TASKS}") from None


# -- corpus types -------------------------------------------------------------


@dataclass
class Token:
    word: str
    pos: str | None = None
    chunk: str | None = None
    ner: str | None = None


@dataclass
class Sentence:
    tokens: list[Token]

    def __len__(self) -> int:
        return len(self.tokens)

    def words(self) -> list[str]:
        return [t.word for t in self.tokens]

    def labels(self, task: str) -> list[str]:
        return [getattr(t, task) for t in self.tokens]


_COLUMNS_TO_TASKS = {2: ("pos",), 3: ("pos", "chunk"), 4: ("pos", "chunk", "ner")}


def read_conll(source, columns: int) -> list[Sentence]:
    """Parse a CoNLL stream with the given column count (2, 3 or 4).

    ``source`` is any iterable of lines (an open text file works). Labels are
    validated against their scheme; a bad row raises with its line number.
    """
    if columns not in _COLUMNS_TO_TASKS:
        raise ConllFormatError(f"unsupported column count {columns}")
    tasks = _COLUMNS_TO_TASKS[columns]
    sentences: list[Sentence] = []
    tokens: list[Token] = []
    for lineno, line in enumerate(source, start=1):
        fields = line.split()
        if not fields:
            if tokens:
                sentences.append(Sentence(tokens))
                tokens = []
            continue
        if len(fields) != columns:
            raise ConllFormatError(
                f"line {lineno}: expected {columns} columns, got {len(fields)}"
            )
        token = Token(fields[0])
        for value, task in zip(fields[1:], tasks):
            if value not in _SCHEMES[task]:
                raise LabelSchemeError(
                    f"line {lineno}: label {value!r} is not in the {task} label scheme"
                )
            setattr(token, task, value)
        tokens.append(token)
    if tokens:
        sentences.append(Sentence(tokens))
    return sentences


def write_conll(sentences, columns: int) -> str:
    """Render sentences back to CoNLL text (inverse of read_conll)."""
    if columns not in _COLUMNS_TO_TASKS:
        raise ConllFormatError(f"unsupported column count {columns}")
    tasks = _COLUMNS_TO_TASKS[columns]
    lines: list[str] = []
    for sent in sentences:
        for token in sent.tokens:
            fields = [token.word]
            for task in tasks:
                value = getattr(token, task)
                if value is None:
                    raise ConllFormatError(
                        f"token {token.word!r} is missing its {task} column"
                    )
                fields.append(value)
            lines.append(" ".join(fields))
        lines.append("")
    return "\n".join(lines) + "\n" if lines else ""


# -- vocabularies --------------------------------------------------------------


class Vocabulary:
    """String-to-id map with reserved PAD (0) and UNK (1) entries.

    Lookup of an unseen string returns UNK; word vocabularies additionally
    try the lowercased form first so that case variants still hit their
    pre-trained embedding row.
    """

    def __init__(self, fold_case_fallback: bool = False):
        self._ids: dict[str, int] = {PAD: PAD_ID, UNK: UNK_ID}
        self._strings: list[str] = [PAD, UNK]
        self.fold_case_fallback = fold_case_fallback

    def __len__(self) -> int:
        return len(self._strings)

    def __contains__(self, s: str) -> bool:
        return s in self._ids

    def add(self, s: str) -> int:
        existing = self._ids.get(s)
        if existing is not None:
            return existing
        idx = len(self._strings)
        self._ids[s] = idx
        self._strings.append(s)
        return idx

    def id(self, s: str) -> int:
        idx = self._ids.get(s)
        if idx is not None:
            return idx
        if self.fold_case_fallback:
            idx = self._ids.get(s.lower())
            if idx is not None:
                return idx
        return UNK_ID

    def string(self, idx: int) -> str:
        return self._strings[idx]

    @property
    def strings(self) -> list[str]:
        return list(self._strings)

    def non_reserved(self) -> list[str]:
        return self._strings[2:]


@dataclass
class EmbeddingTable:
    """Vocabulary plus a |V| x d matrix; row i embeds vocabulary entry i."""

    vocabulary: Vocabulary
    matrix: np.ndarray
    dim: int

    def lookup(self, word: str) -> np.ndarray:
        return self.matrix[self.vocabulary.id(word)]


def load_embeddings(source, rng: Rng | None = None) -> EmbeddingTable:
    """Load word2vec-style text embeddings: header "count dim", then rows.

    The PAD row is zeros and the UNK row is drawn uniformly from
    [-sqrt(3/d), +sqrt(3/d)] using ``rng`` (seed 0 when omitted). Duplicate
    words keep their first vector.
    """
    rng = rng if rng is not None else Rng(0)
    it = iter(source)
    try:
        header = next(it).split()
        declared, dim = int(header[0]), int(header[1])
    except (StopIteration, IndexError, ValueError):
        raise EmbeddingFormatError(
            'embedding file must start with a "count dim" header line'
        ) from None
    if dim <= 0:
        raise EmbeddingFormatError(f"embedding dimension must be positive, got {dim}")

    vocab = Vocabulary(fold_case_fallback=True)
    rows: list[np.ndarray] = []
    bound = float(np.sqrt(3.0 / dim))
    rows.append(np.zeros(dim))                              # PAD
    rows.append(rng.uniform_array((dim,), -bound, bound))   # UNK
    for lineno, line in enumerate(it, start=2):
        fields = line.split()
        if not fields:
            continue
        word, values = fields[0], fields[1:]
        if len(values) != dim:
            raise EmbeddingFormatError(
                f"line {lineno}: expected {dim} values for {word!r}, got {len(values)}"
            )
        if word in vocab:
            log.warning("duplicate embedding for %r (line %d); keeping first", word, lineno)
            continue
        vocab.add(word)
        rows.append(np.array([float(v) for v in values]))
    actual = len(vocab) - 2
    if actual != declared:
        log.warning("embedding header declared %d words, file has %d", declared, actual)
    return EmbeddingTable(vocab, np.vstack(rows), dim)


# -- corpus splitting -----------------------------------------------------------


def split_corpus(sentences, rng_seed: int):
    """Shuffle and cut a corpus into (train, dev, test).

    Sizes are test = round(0.2 N), dev = round(0.1 N) (half-up, exact integer
    arithmetic) and train takes the remainder. Deterministic given the seed.
    """
    n = len(sentences)
    if n < 10:
        raise DataError(f"corpus of {n} sentences is too small to split (need >= 10)")
    n_test = (2 * n + 5) // 10
    n_dev = (n + 5) // 10
    n_train = n - n_test - n_dev
    order = Rng(rng_seed).shuffled(range(n))
    train = [sentences[i] for i in order[:n_train]]
    dev = [sentences[i] for i in order[n_train:n_train + n_dev]]
    test = [sentences[i] for i in order[n_train + n_dev:]]
    return train, dev, test


def build_vocabularies(train, embedding_vocab: Vocabulary | None = None):
    """Vocabularies for a training corpus.

    Word vocabulary is the embedding vocabulary (when given) extended with
    training words; the char vocabulary covers all characters of training
    words. Label maps are returned for every populated column, in scheme
    order.
    """
    if not train:
        raise DataError("cannot build vocabularies from an empty training set")
    word_vocab = Vocabulary(fold_case_fallback=True)
    if embedding_vocab is not None:
        for w in embedding_vocab.non_reserved():
            word_vocab.add(w)
    char_vocab = Vocabulary(fold_case_fallback=False)
    for sent in train:
        for token in sent.tokens:
            word_vocab.add(token.word)
            for ch in token.word:
                char_vocab.add(ch)
    populated = [t for t in TASKS if getattr(train[0].tokens[0], t) is not None]
    label_maps = {
        task: {lab: i for i, lab in enumerate(_SCHEMES[task].encoded_labels)}
        for task in populated
    }
    return word_vocab, char_vocab, label_maps
