"""Synthetic desk-scale corpus for exercising the full training stack.

Fifty template-generated sentences over a 30-word vocabulary. Every word
carries exactly one (POS, chunk, NER) label triple, so each task is
perfectly learnable from word identity alone:

  - n*-words are common nouns (always chunk-initial B-NP), a*-words are
    adjectives that only ever follow a noun (I-NP);
  - v*-words open verb phrases, r*-adverbs continue them;
  - capitalized family names (Nguyen, Tran) open two-token PER spans that
    a given name (Binh, Lan, Minh) always completes; capitalized place and
    organization names form single-token LOC/ORG spans.
"""

from __future__ import annotations

import numpy as np

from .data import EmbeddingTable, Sentence, Token, Vocabulary
from .rng import Rng

# word -> (pos, chunk, ner); 30 entries
WORD_RULES: dict[str, tuple[str, str, str]] = {
    **{w: ("N", "B-NP", "O") for w in ("na", "nb", "nc", "nd", "ne")},
    **{w: ("A", "I-NP", "O") for w in ("aa", "ab")},
    **{w: ("V", "B-VP", "O") for w in ("va", "vb", "vc", "vd")},
    **{w: ("R", "I-VP", "O") for w in ("ra", "rb")},
    "ea": ("E", "B-PP", "O"),
    "ma": ("M", "B-QP", "O"),
    **{w: ("P", "B-NP", "O") for w in ("pa", "pb")},
    "ca": ("C", "O", "O"),
    **{w: ("Np", "B-NP", "B-PER") for w in ("Nguyen", "Tran")},
    **{w: ("Np", "I-NP", "I-PER") for w in ("Binh", "Lan", "Minh", "Anh")},
    **{w: ("Np", "B-NP", "B-LOC") for w in ("Hue", "Hanoi", "Danang")},
    **{w: ("Np", "B-NP", "B-ORG") for w in ("Vico", "Tenco")},
    ".": ("CH", "O", "O"),
}

_NOUNS = ("na", "nb", "nc", "nd", "ne")
_ADJS = ("aa", "ab")
_VERBS = ("va", "vb", "vc", "vd")
_ADVS = ("ra", "rb")
_PRONOUNS = ("pa", "pb")
_FAMILY = ("Nguyen", "Tran")
_GIVEN = ("Binh", "Lan", "Minh", "Anh")
_PLACES = ("Hue", "Hanoi", "Danang")
_ORGS = ("Vico", "Tenco")


def _token(word: str) -> Token:
    pos, chunk, ner = WORD_RULES[word]
    return Token(word, pos=pos, chunk=chunk, ner=ner)


class _Cycler:
    """Round-robin word picker; keeps per-type counts even so every word
    gets enough training occurrences."""

    def __init__(self, words, rng: Rng):
        self._words = words
        self._next = rng.below(len(words))

    def pick(self) -> str:
        word = self._words[self._next % len(self._words)]
        self._next += 1
        return word


class _Lexicon:
    def __init__(self, rng: Rng):
        self.noun = _Cycler(_NOUNS, rng)
        self.adj = _Cycler(_ADJS, rng)
        self.verb = _Cycler(_VERBS, rng)
        self.adv = _Cycler(_ADVS, rng)
        self.pron = _Cycler(_PRONOUNS, rng)
        self.family = _Cycler(_FAMILY, rng)
        self.given = _Cycler(_GIVEN, rng)
        self.place = _Cycler(_PLACES, rng)
        self.org = _Cycler(_ORGS, rng)


def _noun_phrase(rng: Rng, lex: _Lexicon) -> list[str]:
    # entity-heavy mix so NER sees span gradients in every epoch
    kind = rng.below(6)
    if kind == 0:
        return [lex.pron.pick()]
    if kind in (1, 2):
        return [lex.family.pick(), lex.given.pick()]
    if kind == 3:
        return [lex.place.pick()]
    if kind == 4:
        return [lex.org.pick()]
    return [lex.noun.pick(), lex.adj.pick()]


def _object(rng: Rng, lex: _Lexicon) -> list[str]:
    kind = rng.below(4)
    if kind == 0:
        return []
    if kind == 1:
        return _noun_phrase(rng, lex)
    if kind == 2:  # prepositional phrase
        return ["ea"] + _noun_phrase(rng, lex)
    return ["ma", lex.noun.pick()]  # quantity phrase + noun


def make_toy_corpus(seed: int):
    """Deterministic (train, dev) split of 50 synthetic sentences."""
    rng = Rng(seed)
    lex = _Lexicon(rng)
    sentences = []
    for _ in range(50):
        words = list(_noun_phrase(rng, lex))
        words.append(lex.verb.pick())
        if rng.below(2):
            words.append(lex.adv.pick())
        words += _object(rng, lex)
        if rng.below(4) == 0:  # occasional coordinated clause
            words += ["ca", lex.pron.pick(), lex.verb.pick()]
        words.append(".")
        assert 3 <= len(words) <= 12
        sentences.append(Sentence([_token(w) for w in words]))
    return sentences[:45], sentences[45:]


def make_toy_embeddings(dim: int = 300, seed: int = 0) -> EmbeddingTable:
    """Random embedding table covering the toy vocabulary.

    Rows are unit-scale uniform draws: with only 30 words there is no real
    distributional signal to encode, and O(1) inputs let the downstream
    stack separate the classes within a few epochs.
    """
    vocab = Vocabulary(fold_case_fallback=True)
    for word in WORD_RULES:
        vocab.add(word)
    rng = Rng(seed)
    matrix = np.zeros((len(vocab), dim))
    for i in range(1, len(vocab)):
        matrix[i] = rng.uniform_array((dim,), -1.0, 1.0)
    return EmbeddingTable(vocab, matrix, dim)
