"""Tweet text preparation: tokenization, normalization, stemming.

Raw tweet text is split into case-preserving tokens with sentence
boundaries, URLs / @-mentions / leading retweet markers are emitted as
tagged placeholder tokens, and normalization then lowercases, strips
symbols, drops the tagged tokens and applies a stopword policy that can
retain first-person pronouns.  Stemming uses the Porter stemmer from
:mod:`ddacf_kit.porter`.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field

from .porter import stem

__all__ = [
    "TAG_URL",
    "TAG_MENTION",
    "TAG_RT",
    "FIRST_PERSON_PRONOUNS",
    "StopwordPolicy",
    "TokenDoc",
    "tokenize",
    "normalize",
    "stem",
    "process_text",
    "tweet_streams",
    "build_user_doc",
    "load_stopwords",
]

TAG_URL = "<url>"
TAG_MENTION = "<mention>"
TAG_RT = "<rt>"
TAGGED_TOKENS = frozenset({TAG_URL, TAG_MENTION, TAG_RT})

FIRST_PERSON_PRONOUNS = frozenset(
    {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"}
)

_URL_RE = re.compile(r"^(https?://|www\.)", re.IGNORECASE)
_MENTION_RE = re.compile(r"^@\w")
_RT_RE = re.compile(r"rt\W*", re.IGNORECASE)
_SENTENCE_ENDERS = frozenset(".!?")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


@dataclass(frozen=True)
class StopwordPolicy:
    """Stopword removal policy with an optional first-person carve-out.

    When ``self_center`` is true the retained pronouns are excluded from the
    effective stoplist; when false they are removed along with every other
    stopword, whether or not the base list happens to contain them.
    """

    base_list: frozenset[str]
    self_center: bool = True
    retained_pronouns: frozenset[str] = FIRST_PERSON_PRONOUNS

    @property
    def effective_stopwords(self) -> frozenset[str]:
        if self.self_center:
            return self.base_list - self.retained_pronouns
        return self.base_list | self.retained_pronouns


@dataclass(frozen=True)
class TokenDoc:
    """Normalized, stemmed token stream for one user."""

    user_id: str
    tokens: tuple[str, ...]
    sentence_spans: tuple[tuple[int, int], ...] = field(default_factory=tuple)


def tokenize(text: str) -> tuple[list[str], list[tuple[int, int]]]:
    """Split raw tweet text into tokens plus sentence spans.

    Splits on whitespace and punctuation, preserving case.  URLs,
    @-mentions and "RT" markers become tagged tokens for the normalizer to
    drop.  Sentences close on runs of ``. ! ?`` and at the end of the text.
    Returns ``(tokens, spans)`` where each span is a half-open
    ``(start, end)`` pair of token indices.
    """
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    sent_start = 0

    def close_sentence():
        nonlocal sent_start
        if len(tokens) > sent_start:
            spans.append((sent_start, len(tokens)))
            sent_start = len(tokens)

    for chunk in text.split():
        if _URL_RE.match(chunk):
            tokens.append(TAG_URL)
        elif _MENTION_RE.match(chunk):
            tokens.append(TAG_MENTION)
        elif _RT_RE.fullmatch(chunk):
            tokens.append(TAG_RT)
        else:
            current = []
            for ch in chunk:
                if _is_punct(ch):
                    if current:
                        tokens.append("".join(current))
                        current = []
                    if ch in _SENTENCE_ENDERS:
                        close_sentence()
                else:
                    current.append(ch)
            if current:
                tokens.append("".join(current))
            continue
        # tagged chunk: honor any trailing sentence punctuation
        if chunk[-1] in _SENTENCE_ENDERS:
            close_sentence()
    close_sentence()
    return tokens, spans


def _clean(token: str) -> str:
    """Lowercase and strip symbol/punctuation characters from a token."""
    return "".join(ch for ch in token.lower() if ch.isalnum())


def normalize(tokens: list[str], policy: StopwordPolicy) -> list[str]:
    """Lowercase tokens and drop tags, symbols, emoji and stopwords."""
    out = []
    stop = policy.effective_stopwords
    for tok in tokens:
        if tok in TAGGED_TOKENS:
            continue
        cleaned = _clean(tok)
        if not any(ch.isalpha() for ch in cleaned):
            continue
        if cleaned in stop:
            continue
        out.append(cleaned)
    return out


def process_text(
    text: str, policy: StopwordPolicy
) -> tuple[list[str], list[tuple[int, int]]]:
    """Tokenize, normalize and stem one tweet, keeping sentence spans.

    Sentences that normalize to nothing are dropped; the returned spans
    partition the stemmed token list.
    """
    raw, raw_spans = tokenize(text)
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    for s, e in raw_spans:
        kept = [stem(t) for t in normalize(raw[s:e], policy)]
        if kept:
            spans.append((len(tokens), len(tokens) + len(kept)))
            tokens.extend(kept)
    return tokens, spans


def tweet_streams(user, policy: StopwordPolicy):
    """Per-tweet (tokens, spans) streams for one user record."""
    return [process_text(tweet.text, policy) for tweet in user.tweets]


def build_user_doc(user, policy: StopwordPolicy) -> TokenDoc:
    """Concatenate a user's processed tweets into a single TokenDoc."""
    tokens: list[str] = []
    spans: list[tuple[int, int]] = []
    for tweet_tokens, tweet_spans in tweet_streams(user, policy):
        offset = len(tokens)
        tokens.extend(tweet_tokens)
        spans.extend((s + offset, e + offset) for s, e in tweet_spans)
    return TokenDoc(user_id=user.user_id, tokens=tuple(tokens), sentence_spans=tuple(spans))


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file: UTF-8, one word per line, '#' comments."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip().lower()
            if word:
                words.add(word)
    return frozenset(words)
