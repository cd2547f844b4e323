"""Linguistic quality measurement: reading ease, lexical diversity, grammar.

Tokenization is deliberately simple and documented: sentences split on
terminal punctuation followed by whitespace or end of text, words are
lowercased alphanumeric-plus-apostrophe runs. Abbreviation periods therefore
split sentences; that is a known limitation, not a bug. Absolute scores are
comparable only within this tokenizer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyText

_WORD_RE = re.compile(r"[a-z0-9']+")
_SENTENCE_RE = re.compile(r"(?<=[.!?])\s+")

FLESCH_BASE = 206.835
FLESCH_SENTENCE_WEIGHT = 1.015
FLESCH_SYLLABLE_WEIGHT = 84.6

VOWELS = set("aeiouy")


@dataclass(frozen=True)
class MetricsReport:
    re: float
    ttr: float
    g: float
    word_count: int
    sentence_count: int
    type_count: int


def tokenize(text: str):
    """Split text into (words, sentences).

    Words are lowercased; a token must contain at least one alphanumeric
    character. Sentences keep their terminal punctuation.
    """
    if not text or not text.strip():
        raise EmptyText("cannot tokenize empty text")
    words = [w for w in _WORD_RE.findall(text.lower()) if w.strip("'")]
    sentences = [s for s in _SENTENCE_RE.split(text.strip()) if s]
    return words, sentences


def syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups, minus a silent trailing 'e'.

    The trailing 'e' stays when the word ends in consonant + 'le' (table,
    cycle). Never returns less than 1.
    """
    word = word.lower().strip("'")
    if not word:
        return 1
    groups = len(re.findall(r"[aeiouy]+", word))
    if (
        word.endswith("e")
        and not word.endswith("le")
        and groups > 0
    ):
        groups -= 1
    elif (
        word.endswith("le")
        and len(word) >= 3
        and word[-3] in VOWELS
        and groups > 0
    ):
        # vowel + 'le' endings ('male', 'mole') still drop the silent e
        groups -= 1
    return max(1, groups)


def flesch_re(text: str) -> float:
    """Flesch Reading Ease: 206.835 - 1.015*(words/sentence) - 84.6*(syllables/word)."""
    words, sentences = tokenize(text)
    if not words or not sentences:
        raise EmptyText("reading ease needs at least one word and one sentence")
    syllable_count = sum(syllables(w) for w in words)
    return (
        FLESCH_BASE
        - FLESCH_SENTENCE_WEIGHT * (len(words) / len(sentences))
        - FLESCH_SYLLABLE_WEIGHT * (syllable_count / len(words))
    )


def ttr(text: str) -> float:
    """Type-token ratio: unique lowercased word forms over total words."""
    words, _ = tokenize(text)
    if not words:
        raise EmptyText("type-token ratio needs at least one word")
    return len(set(words)) / len(words)


def relative_gain(new: float, old: float) -> float:
    """Relative improvement in percent, e.g. 0.26 -> 0.43 gains 65.38%."""
    return 100.0 * (new - old) / old


def naive_checker(sentence: str) -> int:
    """Count rule violations in one sentence.

    Rules: the sentence must start with a capital letter, must end with
    terminal punctuation, and must not repeat a word twice in a row.
    The duplicate rule applies to alphabetic tokens only, so dates and
    figures ('2020-01-01') do not count as stutters.
    """
    sentence = sentence.strip()
    if not sentence:
        return 0
    errors = 0
    first = sentence[0]
    if first.isalpha() and not first.isupper():
        errors += 1
    if sentence[-1] not in ".!?":
        errors += 1
    words = _WORD_RE.findall(sentence.lower())
    for prev, cur in zip(words, words[1:]):
        if prev == cur and prev.isalpha():
            errors += 1
    return errors


def grammar_score(text: str, checker=naive_checker) -> float:
    """Per-sentence 1 - errors/words, floored at 0, averaged over sentences.

    The checker is injected so a richer grammar tool can replace the naive
    rule set without touching the metric.
    """
    _, sentences = tokenize(text)
    scores = []
    for sentence in sentences:
        words = [w for w in _WORD_RE.findall(sentence.lower()) if w.strip("'")]
        if not words:
            continue
        score = 1.0 - checker(sentence) / len(words)
        scores.append(max(0.0, score))
    if not scores:
        raise EmptyText("grammar score needs at least one sentence with words")
    return sum(scores) / len(scores)


def compute_report(text: str, checker=naive_checker) -> MetricsReport:
    """All three metrics plus the counts behind them."""
    words, sentences = tokenize(text)
    return MetricsReport(
        re=flesch_re(text),
        ttr=ttr(text),
        g=grammar_score(text, checker),
        word_count=len(words),
        sentence_count=len(sentences),
        type_count=len(set(words)),
    )
