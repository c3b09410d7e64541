"""Document-term matrix construction and term transformations.

The matrix is stored sparsely: one ``{column_index: value}`` dict per user
row over a lexicographically sorted vocabulary.  Zero entries are never
stored, so equal matrices serialize identically.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .porter import stem

__all__ = [
    "ValueKind",
    "TermMatrix",
    "Thesaurus",
    "build_dtm",
    "apply_tfidf",
    "prune_sparse",
    "collapse_synonyms",
    "restrict_vocabulary",
]


class ValueKind(Enum):
    COUNT = "count"
    TFIDF = "tfidf"


@dataclass(frozen=True)
class TermMatrix:
    vocabulary: tuple[str, ...]
    rows: tuple[dict[int, float], ...]
    value_kind: ValueKind = ValueKind.COUNT

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_terms(self) -> int:
        return len(self.vocabulary)

    def document_frequency(self, col: int) -> int:
        return sum(1 for row in self.rows if col in row)

    def column_total(self, col: int) -> float:
        return sum(row.get(col, 0.0) for row in self.rows)


@dataclass(frozen=True)
class Thesaurus:
    """Flat term -> group mapping, precomputed offline.

    ``load`` stems the term column so lookups work in the same token space
    as the matrix vocabulary; when two file terms stem to the same form with
    different groups, the lexicographically smallest group id wins.
    """

    mapping: dict[str, str]

    def group(self, term: str) -> str:
        return self.mapping.get(term, term)

    @classmethod
    def load(cls, path) -> "Thesaurus":
        mapping: dict[str, str] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                term, group = line.split("\t")
                key = stem(term.strip().lower())
                group = group.strip()
                if key not in mapping or group < mapping[key]:
                    mapping[key] = group
        return cls(mapping=mapping)


def build_dtm(docs) -> TermMatrix:
    """Count matrix over the union vocabulary of the given token docs.

    Vocabulary is sorted lexicographically; row order follows doc order.
    """
    if not docs:
        raise ValueError("need at least one document")
    counters = [Counter(doc.tokens if hasattr(doc, "tokens") else doc) for doc in docs]
    vocab = sorted(set().union(*counters)) if counters else []
    index = {term: i for i, term in enumerate(vocab)}
    rows = tuple(
        {index[t]: float(c) for t, c in counter.items()} for counter in counters
    )
    return TermMatrix(vocabulary=tuple(vocab), rows=rows, value_kind=ValueKind.COUNT)


def apply_tfidf(m: TermMatrix) -> TermMatrix:
    """Reweight counts as tf * log2(N / df); entries that become 0 are dropped."""
    if m.value_kind is not ValueKind.COUNT:
        raise ValueError("tf-idf expects a count matrix")
    n = m.n_rows
    if n < 1:
        raise ValueError("empty matrix")
    df = [0] * m.n_terms
    for row in m.rows:
        for col in row:
            df[col] += 1
    idf = [math.log2(n / d) if d else 0.0 for d in df]
    rows = tuple(
        {col: tf * idf[col] for col, tf in row.items() if tf * idf[col] != 0.0}
        for row in m.rows
    )
    return TermMatrix(vocabulary=m.vocabulary, rows=rows, value_kind=ValueKind.TFIDF)


def prune_sparse(m: TermMatrix, zero_fraction: float = 0.95) -> TermMatrix:
    """Drop terms whose fraction of zero rows strictly exceeds zero_fraction."""
    if not 0 < zero_fraction < 1:
        raise ValueError("zero_fraction must lie in (0, 1)")
    n = m.n_rows
    df = [0] * m.n_terms
    for row in m.rows:
        for col in row:
            df[col] += 1
    keep = [col for col in range(m.n_terms) if (n - df[col]) / n <= zero_fraction]
    remap = {old: new for new, old in enumerate(keep)}
    vocab = tuple(m.vocabulary[col] for col in keep)
    rows = tuple(
        {remap[col]: v for col, v in row.items() if col in remap} for row in m.rows
    )
    return TermMatrix(vocabulary=vocab, rows=rows, value_kind=m.value_kind)


def collapse_synonyms(m: TermMatrix, th: Thesaurus) -> TermMatrix:
    """Merge the columns of each thesaurus group by summing counts per row.

    The merged column takes the group id as its name; terms absent from the
    thesaurus pass through unchanged.  Per-row totals are preserved.
    """
    if m.value_kind is not ValueKind.COUNT:
        raise ValueError("synonym collapsing runs on counts, before tf-idf")
    names = [th.group(term) for term in m.vocabulary]
    vocab = tuple(sorted(set(names)))
    index = {name: i for i, name in enumerate(vocab)}
    col_map = [index[name] for name in names]
    rows = []
    for row in m.rows:
        merged: dict[int, float] = {}
        for col, v in row.items():
            new = col_map[col]
            merged[new] = merged.get(new, 0.0) + v
        rows.append(merged)
    return TermMatrix(vocabulary=vocab, rows=tuple(rows), value_kind=m.value_kind)


def restrict_vocabulary(m: TermMatrix, allowed) -> TermMatrix:
    """Keep only the columns whose term name is in ``allowed``."""
    allowed = set(allowed)
    keep = [col for col, term in enumerate(m.vocabulary) if term in allowed]
    remap = {old: new for new, old in enumerate(keep)}
    vocab = tuple(m.vocabulary[col] for col in keep)
    rows = tuple(
        {remap[col]: v for col, v in row.items() if col in remap} for row in m.rows
    )
    return TermMatrix(vocabulary=vocab, rows=rows, value_kind=m.value_kind)
