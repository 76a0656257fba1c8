"""Toy text pipeline standing in for a learned semantic codec.

Sentences are mapped token by token onto fixed-width binary codes, sent
through an iid bit-flip channel and decoded by inverse table lookup. Fidelity
is scored with per-sentence BLEU.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

UNK = "<unk>"


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def load_corpus(path: str | Path | None = None) -> list[list[str]]:
    """One sentence per line, UTF-8. ``None`` loads the bundled corpus."""
    if path is None:
        text = resources.files("covertsem").joinpath("data/corpus.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    corpus = [tokenize(line) for line in text.splitlines()]
    corpus = [s for s in corpus if s]
    if not corpus:
        raise ValueError("corpus is empty")
    return corpus


@dataclass(frozen=True)
class Codebook:
    """Token to code index; index 0 is reserved for unknown tokens."""

    vocabulary: dict[str, int]
    code_width_bits: int
    _inverse: dict[int, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = sorted(self.vocabulary.values())
        if idx != list(range(1, len(idx) + 1)):
            raise ValueError("vocabulary indices must be exactly 1..|V|")
        if 2**self.code_width_bits <= len(idx):
            raise ValueError("code width too small for vocabulary")
        object.__setattr__(self, "_inverse", {i: t for t, i in self.vocabulary.items()})

    @classmethod
    def from_corpus(cls, corpus) -> "Codebook":
        counts = Counter(tok for sent in corpus for tok in sent)
        # most frequent first, alphabetical among equals
        ordered = sorted(counts, key=lambda t: (-counts[t], t))
        vocab = {tok: i + 1 for i, tok in enumerate(ordered)}
        width = max(1, math.ceil(math.log2(len(vocab) + 1)))
        return cls(vocab, width)

    def token(self, index: int) -> str:
        return self._inverse.get(index, UNK)


def encode(sentence, codebook: Codebook) -> np.ndarray:
    """Bitstream (uint8 array, MSB first per code) for a token list."""
    width = codebook.code_width_bits
    idx = np.array([codebook.vocabulary.get(t, 0) for t in sentence], dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1)
    return ((idx[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def apply_bit_errors(bits, bep: float, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit independently with probability ``bep``.

    One uniform per bit is consumed regardless of ``bep``, so a shared seed
    yields nested flip sets across error rates.
    """
    if not 0.0 <= bep <= 1.0:
        raise ValueError("bep must lie in [0, 1]")
    bits = np.asarray(bits, dtype=np.uint8)
    flips = rng.random(bits.shape) < bep
    return bits ^ flips.astype(np.uint8)


def decode(bits, codebook: Codebook) -> list[str]:
    width = codebook.code_width_bits
    bits = np.asarray(bits, dtype=np.int64)
    n = bits.size // width
    if n == 0:
        return []
    codes = bits[: n * width].reshape(n, width)
    idx = codes @ (1 << np.arange(width - 1, -1, -1))
    return [codebook.token(int(i)) for i in idx]


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    weights: tuple[float, ...] | None = None
    smoothing: bool = True

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.weights is not None:
            if len(self.weights) != self.max_order:
                raise ValueError("need one weight per order")
            if not math.isclose(sum(self.weights), 1.0, abs_tol=1e-9):
                raise ValueError("weights must sum to 1")

    @property
    def order_weights(self) -> tuple[float, ...]:
        if self.weights is not None:
            return tuple(self.weights)
        return (1.0 / self.max_order,) * self.max_order


def _ngrams(tokens, n) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(reference, candidate, cfg: BleuConfig = BleuConfig()) -> float:
    """Sentence-level BLEU with clipped n-gram precisions.

    With ``cfg.smoothing`` the precisions of order >= 2 use add-one
    smoothing; the unigram precision never does.
    """
    if len(reference) == 0:
        raise ValueError("reference must be non-empty")
    if len(candidate) == 0:
        return 0.0
    log_sum = 0.0
    for n, w in enumerate(cfg.order_weights, start=1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        matched = sum(min(c, ref[g]) for g, c in cand.items())
        total = max(len(candidate) - n + 1, 0)
        if cfg.smoothing and n >= 2:
            matched, total = matched + 1, total + 1
        if matched == 0 or total == 0:
            return 0.0
        log_sum += w * math.log(matched / total)
    bp = min(1.0, math.exp(1.0 - len(reference) / len(candidate)))
    return bp * math.exp(log_sum)


def transmit(sentence, codebook: Codebook, bep: float, rng: np.random.Generator) -> list[str]:
    return decode(apply_bit_errors(encode(sentence, codebook), bep, rng), codebook)


def mean_bleu_at_bep(
    bep: float,
    corpus,
    trials: int,
    cfg: BleuConfig = BleuConfig(),
    rng: np.random.Generator | None = None,
    codebook: Codebook | None = None,
) -> float:
    """Average BLEU of ``trials`` corpus sentences sent through the channel."""
    if not corpus:
        raise ValueError("corpus is empty")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng() if rng is None else rng
    codebook = Codebook.from_corpus(corpus) if codebook is None else codebook
    picks = rng.integers(len(corpus), size=trials)
    total = 0.0
    for i in picks:
        ref = corpus[i]
        total += bleu(ref, transmit(ref, codebook, bep, rng), cfg)
    return total / trials


class BleuLookup:
    """Precomputed BEP to mean-BLEU curve with linear interpolation.

    Grid points are log-spaced on ``[bep_min, 0.5]``; ``bep = 0`` is pinned
    to 1 since the codec is lossless there.
    """

    def __init__(self, beps, scores):
        beps = np.asarray(beps, dtype=float)
        scores = np.asarray(scores, dtype=float)
        if beps.ndim != 1 or beps.shape != scores.shape or np.any(np.diff(beps) <= 0):
            raise ValueError("beps must be strictly increasing and match scores")
        if beps[0] > 0:
            beps = np.concatenate([[0.0], beps])
            scores = np.concatenate([[1.0], scores])
        self.beps = beps
        self.scores = scores

    @classmethod
    def build(
        cls,
        corpus,
        trials: int = 4000,
        cfg: BleuConfig = BleuConfig(),
        seed: int = 0,
        points: int = 64,
        bep_min: float = 1e-5,
    ) -> "BleuLookup":
        codebook = Codebook.from_corpus(corpus)
        grid = np.geomspace(bep_min, 0.5, points)
        # same seed at every grid point: common random numbers along the curve
        scores = [
            mean_bleu_at_bep(b, corpus, trials, cfg, np.random.default_rng(seed), codebook)
            for b in grid
        ]
        return cls(grid, scores)

    def __call__(self, bep):
        out = np.interp(np.clip(bep, 0.0, 1.0), self.beps, self.scores)
        return float(out) if np.ndim(out) == 0 else out

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bep", "score"])
            for b, s in zip(self.beps, self.scores):
                writer.writerow([repr(float(b)), repr(float(s))])

    @classmethod
    def from_csv(cls, path: str | Path) -> "BleuLookup":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(line for line in fh if not line.startswith("#"))]
        data = np.array([[float(x) for x in r] for r in rows[1:]])
        return cls(data[:, 0], data[:, 1])
