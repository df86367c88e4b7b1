"""Trigram part-of-speech tagger with exact N-best decoding.

The model is a standard HMM: transition probabilities P(t_i | t_{i-2},
t_{i-1}) and emission probabilities P(word | tag), both with add-lambda
smoothing over a closed tag vocabulary.  Sentences are padded with two
synthetic start tags and one stop tag.  Unknown words receive a reserved
emission slot shared by the open classes only.

Decoding keeps, per trellis state (t_{i-1}, t_i), the N best distinct
prefixes; with a trigram model this is exact, so ``n_best`` agrees with
exhaustive enumeration.  The blender intersects morphology-derived POS
sets with the tags seen in the N-best sequences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .lexicon import OPEN_CLASSES, POS_CODES

START = "<s>"
STOP = "</s>"
UNK = "<unk>"

NEG_INF = float("-inf")


@dataclass(frozen=True)
class TagSequence:
    tags: tuple
    logprob: float

    def __iter__(self):
        return iter(self.tags)


@dataclass
class TrigramModel:
    """Counts-based model; immutable after training, safe to share."""

    tags: tuple
    lam: float = 0.1
    open_tags: tuple = OPEN_CLASSES
    corpus: str = ""
    c3: dict = field(default_factory=dict)   # (u, v, t) -> count
    c2: dict = field(default_factory=dict)   # (u, v) -> count
    ce: dict = field(default_factory=dict)   # (t, w) -> count
    ct: dict = field(default_factory=dict)   # t -> count
    vocab: frozenset = frozenset()

    @classmethod
    def train(cls, sentences, lam=0.1, tags=POS_CODES, open_tags=OPEN_CLASSES, corpus=""):
        """Maximum-likelihood counts over (word, tag) sentences.

        Raises ValueError on an empty corpus or a tag outside the
        declared vocabulary.
        """
        sentences = list(sentences)
        if not sentences or all(not s for s in sentences):
            raise ValueError("empty training corpus")
        model = cls(tags=tuple(tags), lam=lam, open_tags=tuple(open_tags), corpus=corpus)
        tagset = set(model.tags)
        vocab = set()
        for sentence in sentences:
            if not sentence:
                continue
            seq = [START, START] + [t for _, t in sentence] + [STOP]
            for word, tag in sentence:
                if tag not in tagset:
                    raise ValueError("tag %r not in declared vocabulary" % tag)
                model.ce[(tag, word)] = model.ce.get((tag, word), 0) + 1
                model.ct[tag] = model.ct.get(tag, 0) + 1
                vocab.add(word)
            for u, v, t in zip(seq, seq[1:], seq[2:]):
                model.c3[(u, v, t)] = model.c3.get((u, v, t), 0) + 1
                model.c2[(u, v)] = model.c2.get((u, v), 0) + 1
        model.vocab = frozenset(vocab)
        return model

    # -- probabilities ------------------------------------------------

    def trans_p(self, u, v, t):
        """P(t | u, v), smoothed over the tag vocabulary plus stop."""
        k = len(self.tags) + 1
        num = self.c3.get((u, v, t), 0) + self.lam
        den = self.c2.get((u, v), 0) + self.lam * k
        return num / den if den > 0 else 0.0

    def emit_p(self, t, w):
        """P(w | t); unknown-word mass is reserved for open classes."""
        is_open = t in self.open_tags
        size = len(self.vocab) + (1 if is_open else 0)
        den = self.ct.get(t, 0) + self.lam * size
        if den <= 0:
            return 0.0
        if w == UNK or w not in self.vocab:
            if not is_open:
                return 0.0
            return self.lam / den
        return (self.ce.get((t, w), 0) + self.lam) / den

    def trans_logp(self, u, v, t):
        p = self.trans_p(u, v, t)
        return math.log(p) if p > 0 else NEG_INF

    def emit_logp(self, t, w):
        p = self.emit_p(t, w)
        return math.log(p) if p > 0 else NEG_INF

    def candidates(self, word):
        """Tags considered for a token at decode time."""
        if word in self.vocab:
            if self.lam > 0:
                return self.tags
            return tuple(t for t in self.tags if self.ce.get((t, word), 0) > 0)
        return tuple(t for t in self.tags if t in self.open_tags)

    # -- serialization ------------------------------------------------

    def save(self, path):
        data = {
            "format": "treegraft-tagger",
            "v": 1,
            "tags": list(self.tags),
            "open_tags": list(self.open_tags),
            "lam": self.lam,
            "corpus": self.corpus,
            "c3": [[u, v, t, n] for (u, v, t), n in sorted(self.c3.items())],
            "c2": [[u, v, n] for (u, v), n in sorted(self.c2.items())],
            "ce": [[t, w, n] for (t, w), n in sorted(self.ce.items())],
            "ct": sorted(self.ct.items()),
            "vocab": sorted(self.vocab),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(data, f, separators=(",", ":"))

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        if data.get("format") != "treegraft-tagger" or data.get("v") != 1:
            raise ValueError("unrecognized tagger model file %s" % path)
        model = cls(
            tags=tuple(data["tags"]),
            lam=data["lam"],
            open_tags=tuple(data["open_tags"]),
            corpus=data.get("corpus", ""),
        )
        model.c3 = {(u, v, t): n for u, v, t, n in data["c3"]}
        model.c2 = {(u, v): n for u, v, n in data["c2"]}
        model.ce = {(t, w): n for t, w, n in data["ce"]}
        model.ct = {t: n for t, n in data["ct"]}
        model.vocab = frozenset(data["vocab"])
        return model


def n_best(model, sentence, n):
    """The n highest joint-probability tag sequences, best first.

    Exact: per-state beams of size n over a trigram trellis lose no
    member of the true top n.  Ties order lexicographically by tags so
    the ranking is a total order.  Fewer than n sequences come back only
    when fewer have nonzero probability.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    words = list(sentence)
    if not words:
        raise ValueError("empty sentence")

    # beams: state (u, v) -> list of (logp, tags) sorted best-first
    beams = {(START, START): [(0.0, ())]}
    for word in words:
        cands = model.candidates(word)
        merged = {}
        for (u, v), paths in beams.items():
            for t in cands:
                elp = model.emit_logp(t, word)
                if elp == NEG_INF:
                    continue
                tlp = model.trans_logp(u, v, t)
                if tlp == NEG_INF:
                    continue
                bucket = merged.setdefault((v, t), [])
                for lp, tags in paths:
                    bucket.append((lp + tlp + elp, tags + (t,)))
        beams = {}
        for state, bucket in merged.items():
            bucket.sort(key=lambda e: (-e[0], e[1]))
            beams[state] = bucket[:n]
        if not beams:
            return []

    final = []
    for (u, v), paths in beams.items():
        slp = model.trans_logp(u, v, STOP)
        if slp == NEG_INF:
            continue
        for lp, tags in paths:
            final.append((lp + slp, tags))
    final.sort(key=lambda e: (-e[0], e[1]))
    return [TagSequence(tags, lp) for lp, tags in final[:n]]


def viterbi(model, sentence):
    """Single best tag sequence (n_best with n = 1)."""
    best = n_best(model, sentence, 1)
    return best[0] if best else None


def blend(morph_pos, nbest):
    """Filter morphological POS ambiguity with the tagger's N-best tags.

    Per token, intersect the morphology-derived set with the tags seen
    at that position in any sequence; an empty intersection falls back
    to the unfiltered set.  With no sequences (tagger off) this is the
    identity.
    """
    if not nbest:
        return [set(p) for p in morph_pos]
    for seq in nbest:
        if len(seq.tags) != len(morph_pos):
            raise ValueError(
                "sequence length %d does not match sentence length %d"
                % (len(seq.tags), len(morph_pos)))
    out = []
    for i, pos_set in enumerate(morph_pos):
        seen = {seq.tags[i] for seq in nbest}
        narrowed = set(pos_set) & seen
        out.append(narrowed if narrowed else set(pos_set))
    return out


def read_tagged_corpus(text):
    """Parse ``word_TAG`` token lines, one sentence per line."""
    sentences = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sentence = []
        for token in line.split():
            word, sep, tag = token.rpartition("_")
            if not sep:
                raise ValueError("line %d: token %r has no _TAG" % (lineno, token))
            sentence.append((word, tag))
        sentences.append(sentence)
    return sentences
