"""Tokenizers, POS annotation, lexicons and subword vocabulary pruning."""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

NOUN = "NOUN"
PROPN = "PROPN"
ADJ = "ADJ"
OTHER = "OTHER"
POS_TAGS = (NOUN, PROPN, ADJ, OTHER)

UNK = "<unk>"
DEFAULT_SPECIALS = ("<s>", "</s>", "<pad>", UNK, "<mask>")

_ASCII_PUNCT = frozenset(string.punctuation)
_DANDAS = frozenset("।॥")  # । ॥


class AlignmentError(ValueError):
    """POS sidecar tokens disagree with the corpus tokenization."""


@dataclass(frozen=True)
class TokenSeq:
    tokens: tuple[str, ...]
    pos: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.pos is not None:
            object.__setattr__(self, "pos", tuple(self.pos))
            if len(self.pos) != len(self.tokens):
                raise ValueError(
                    f"pos has {len(self.pos)} tags for {len(self.tokens)} tokens")
        for tok in self.tokens:
            if not tok or any(ch.isspace() for ch in tok):
                raise ValueError(f"invalid token {tok!r}")

    def __len__(self):
        return len(self.tokens)

    def text(self) -> str:
        return " ".join(self.tokens)

    def with_tokens(self, tokens: Sequence[str]) -> "TokenSeq":
        return TokenSeq(tuple(tokens), self.pos)


def _split_edges(word: str, punct) -> list[str]:
    start, end = 0, len(word)
    while start < end and word[start] in punct:
        start += 1
    while end > start and word[end - 1] in punct:
        end -= 1
    return list(word[:start]) + ([word[start:end]] if start < end else []) + list(word[end:])


def tokenize_en(text: str) -> TokenSeq:
    """Whitespace split, then detach leading/trailing ASCII punctuation.

    Each detached punctuation character becomes its own token so that the
    tokenizer is idempotent on its space-joined output.
    """
    out: list[str] = []
    for word in text.split():
        out.extend(_split_edges(word, _ASCII_PUNCT))
    return TokenSeq(tuple(out))


def tokenize_hi(text: str) -> TokenSeq:
    """Hindi tokenizer: dandas are split off anywhere, ASCII punctuation at word edges."""
    out: list[str] = []
    for word in text.split():
        piece = ""
        for ch in word:
            if ch in _DANDAS:
                if piece:
                    out.extend(_split_edges(piece, _ASCII_PUNCT))
                    piece = ""
                out.append(ch)
            else:
                piece += ch
        if piece:
            out.extend(_split_edges(piece, _ASCII_PUNCT))
    return TokenSeq(tuple(out))


# --- lexicons ---------------------------------------------------------------

@dataclass(frozen=True)
class Lexicon:
    name: str
    words: frozenset[str]

    def __post_init__(self):
        words = frozenset(self.words)
        for w in words:
            if not w or w != w.lower():
                raise ValueError(f"lexicon {self.name!r}: entry {w!r} must be non-empty lowercase")
        object.__setattr__(self, "words", words)

    def __contains__(self, word: object) -> bool:
        return isinstance(word, str) and word.lower() in self.words

    def __len__(self):
        return len(self.words)


def parse_lexicon(lines: Iterable[str], name: str = "lexicon") -> Lexicon:
    words = set()
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            words.add(line.lower())
    return Lexicon(name, frozenset(words))


def load_lexicon(path: str | Path, name: str | None = None) -> Lexicon:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        return parse_lexicon(f, name or path.stem)


def default_color_lexicon() -> Lexicon:
    text = resources.files("mmtharness").joinpath("data/colors.txt").read_text(encoding="utf-8")
    return parse_lexicon(text.splitlines(), "colors")


# --- POS annotation ---------------------------------------------------------

def default_tag_map() -> dict[str, str]:
    return {"NOUN": NOUN, "PROPN": PROPN, "ADJ": ADJ}


def load_tag_map(path: str | Path) -> dict[str, str]:
    """Read ``source_tag<TAB>target_tag`` lines; targets must be one of the four POS classes."""
    mapping = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in POS_TAGS:
                raise ValueError(f"{path}:{lineno}: expected 'tag<TAB>{{{','.join(POS_TAGS)}}}'")
            mapping[parts[0]] = parts[1]
    return mapping


class SidecarTags:
    """Pre-computed POS tags, one ``token<TAB>tag`` line per token.

    Sentences are separated by blank lines and must line up with the
    corpus order.
    """

    def __init__(self, sentences: list[list[tuple[str, str]]],
                 tag_map: Mapping[str, str] | None = None):
        self.sentences = sentences
        self.tag_map = dict(default_tag_map() if tag_map is None else tag_map)

    @classmethod
    def parse(cls, lines: Iterable[str], tag_map=None) -> "SidecarTags":
        sentences: list[list[tuple[str, str]]] = []
        current: list[tuple[str, str]] = []
        for lineno, raw in enumerate(lines, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                if current:
                    sentences.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"sidecar line {lineno}: expected 'token<TAB>tag', got {line!r}")
            current.append((parts[0], parts[1]))
        if current:
            sentences.append(current)
        return cls(sentences, tag_map)

    @classmethod
    def load(cls, path: str | Path, tag_map=None) -> "SidecarTags":
        with open(path, encoding="utf-8") as f:
            return cls.parse(f, tag_map)

    def tags_for(self, seq: TokenSeq, index: int) -> list[str]:
        if index >= len(self.sentences):
            raise AlignmentError(f"sentence {index}: no sidecar entry "
                                 f"(sidecar has {len(self.sentences)} sentences)")
        pairs = self.sentences[index]
        if len(pairs) != len(seq.tokens):
            raise AlignmentError(f"sentence {index}: sidecar has {len(pairs)} tags "
                                 f"for {len(seq.tokens)} tokens")
        tags = []
        for pos, ((tok, tag), expected) in enumerate(zip(pairs, seq.tokens)):
            if tok != expected:
                raise AlignmentError(f"sentence {index}, token {pos}: "
                                     f"sidecar has {tok!r}, corpus has {expected!r}")
            tags.append(self.tag_map.get(tag, OTHER))
        return tags


class LexiconTagger:
    """Hermetic fallback tagger: NOUN/ADJ by lexicon membership, else OTHER."""

    def __init__(self, nouns: Lexicon, adjectives: Lexicon | None = None):
        self.nouns = nouns
        self.adjectives = adjectives if adjectives is not None else Lexicon("adjectives", frozenset())

    def tags_for(self, seq: TokenSeq, index: int = 0) -> list[str]:
        tags = []
        for tok in seq.tokens:
            if tok in self.nouns:
                tags.append(NOUN)
            elif tok in self.adjectives:
                tags.append(ADJ)
            else:
                tags.append(OTHER)
        return tags


def pos_annotate(seq: TokenSeq, source: SidecarTags | LexiconTagger, index: int = 0) -> TokenSeq:
    """Return ``seq`` with POS tags filled in; tokens are never changed.

    ``index`` is the sentence position in the corpus, used to find the
    matching block of a sidecar file.
    """
    return TokenSeq(seq.tokens, tuple(source.tags_for(seq, index)))


def annotate_corpus(seqs: Sequence[TokenSeq], source) -> list[TokenSeq]:
    if isinstance(source, SidecarTags) and len(source.sentences) != len(seqs):
        raise AlignmentError(f"sidecar has {len(source.sentences)} sentences, "
                             f"corpus has {len(seqs)}")
    return [pos_annotate(seq, source, i) for i, seq in enumerate(seqs)]


# --- subword vocabulary -----------------------------------------------------

@dataclass(frozen=True)
class SubwordVocab:
    units: tuple[str, ...]
    marker: str = ""
    _index: frozenset[str] = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        units = tuple(self.units)
        if len(set(units)) != len(units):
            raise ValueError("vocabulary units must be distinct")
        if any(not u for u in units):
            raise ValueError("vocabulary units must be non-empty")
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "_index", frozenset(units))
        object.__setattr__(self, "_max_len", max((len(u) for u in units), default=0))

    def __contains__(self, unit):
        return unit in self._index

    def __len__(self):
        return len(self.units)


def load_vocab(path: str | Path, marker: str = "") -> SubwordVocab:
    with open(path, encoding="utf-8") as f:
        units = [line.rstrip("\n") for line in f]
    return SubwordVocab(tuple(u for u in units if u), marker)


def _segment_word(word: str, vocab: SubwordVocab) -> list[str]:
    pieces = []
    i = 0
    while i < len(word):
        prefix = vocab.marker if i > 0 else ""
        match = None
        for j in range(min(len(word), i + vocab._max_len), i, -1):
            cand = prefix + word[i:j]
            if cand in vocab:
                match = (cand, j)
                break
        if match is None:
            pieces.append(UNK)
            i += 1
        else:
            pieces.append(match[0])
            i = match[1]
    return pieces


def subword_segment(text: str, vocab: SubwordVocab) -> list[str]:
    """Greedy longest-match-first segmentation of each whitespace-separated word."""
    units = []
    for word in text.split():
        units.extend(_segment_word(word, vocab))
    return units


def prune_vocab(vocab: SubwordVocab, corpora: Iterable[Iterable[str]],
                specials: Iterable[str] = DEFAULT_SPECIALS) -> SubwordVocab:
    """Keep only units that the segmenter actually emits on some corpus sentence.

    Special units present in the vocabulary are always kept; relative
    order is preserved.
    """
    used = set(specials)
    for corpus in corpora:
        for sentence in corpus:
            used.update(subword_segment(sentence, vocab))
    return SubwordVocab(tuple(u for u in vocab.units if u in used), vocab.marker)
