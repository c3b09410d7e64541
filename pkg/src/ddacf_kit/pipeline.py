"""Fold-level feature pipeline.

``PreparedCorpus`` holds the per-user, fold-independent products of text
preparation (stem counters, per-tweet sentiment, account measures), so a
cross-validation run tokenizes each user exactly once.  ``FeaturePipeline``
fits every fold-dependent statistic (vocabulary restriction, sparsity
pruning, term selection, document frequencies, quartile cut points) on the
training rows only and applies the frozen state to any rows, which is what
keeps test folds from leaking into the model.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Label
from .errors import EmptyVocab
from .features import (
    ACCOUNT_FIELDS,
    AccountMeasures,
    AccountMode,
    FeatureConfig,
    FeatureSet,
    SentimentMode,
    UseWords,
    assemble_features,
    compute_account_measures,
    quartile_cuts,
    schema_fingerprint,
    select_terms,
    transform_measures,
    tweet_sentiment,
    user_sentiment,
)
from .matrix import TermMatrix, ValueKind
from .resources import Resources
from .textprep import StopwordPolicy, tweet_streams

DEFAULT_SPARSE_THRESHOLD = 0.95


@dataclass(frozen=True)
class PreparedCorpus:
    """Fold-independent per-user preprocessing products."""

    user_ids: tuple[str, ...]
    labels: tuple[Label, ...]
    raw_counters: tuple[Counter, ...]      # stem -> count
    mapped_counters: tuple[Counter, ...]   # thesaurus-group -> count
    tweet_scores: tuple[tuple[tuple[float, float], ...], ...]
    measures: tuple[AccountMeasures, ...]

    def __len__(self) -> int:
        return len(self.user_ids)

    def counters_for(self, synonyms: bool):
        return self.mapped_counters if synonyms else self.raw_counters

    @classmethod
    def prepare(cls, corpus: Corpus, self_center: bool, resources: Resources) -> "PreparedCorpus":
        policy = StopwordPolicy(base_list=resources.stopwords, self_center=self_center)
        group = resources.thesaurus.group
        raw_counters = []
        mapped_counters = []
        tweet_scores = []
        measures = []
        for user in corpus.users:
            streams = tweet_streams(user, policy)
            counter = Counter()
            for tokens, _ in streams:
                counter.update(tokens)
            raw_counters.append(counter)
            mapped = Counter()
            for term, count in counter.items():
                mapped[group(term)] += count
            mapped_counters.append(mapped)
            tweet_scores.append(
                tuple(
                    tweet_sentiment(tokens, spans, resources.lexicon)
                    for tokens, spans in streams
                )
            )
            measures.append(compute_account_measures(user))
        return cls(
            user_ids=tuple(u.user_id for u in corpus.users),
            labels=tuple(u.label for u in corpus.users),
            raw_counters=tuple(raw_counters),
            mapped_counters=tuple(mapped_counters),
            tweet_scores=tuple(tweet_scores),
            measures=tuple(measures),
        )


class FeaturePipeline:
    """Fit fold statistics on training users; transform any users."""

    def __init__(
        self,
        cfg: FeatureConfig,
        resources: Resources,
        sparse_threshold: float = DEFAULT_SPARSE_THRESHOLD,
    ):
        self.cfg = cfg
        self.resources = resources
        self.sparse_threshold = sparse_threshold
        self.selected_terms: tuple[str, ...] = ()
        self.idf: dict[str, float] = {}
        self.cuts: np.ndarray | None = None
        self.dept_sent_vocab: frozenset[str] | None = None
        self.n_train: int = 0
        self.schema: str = ""

    def _candidate_terms(self, prepared, counters, train_idx, train_labels) -> list[str]:
        cfg = self.cfg
        observed = set()
        for i in train_idx:
            observed.update(counters[i])
        if cfg.use_words is UseWords.DEPT_SENT:
            lexicon = self.resources.lexicon.polarity
            raw = set()
            for i, label in zip(train_idx, train_labels):
                if label is Label.DEPRESSED:
                    raw.update(t for t in prepared.raw_counters[i] if t in lexicon)
            if not raw:
                raise EmptyVocab("no sentiment word found in depressed training users")
            self.dept_sent_vocab = frozenset(raw)
            if cfg.synonyms:
                group = self.resources.thesaurus.group
                allowed = {group(t) for t in raw}
            else:
                allowed = raw
            return sorted(observed & allowed)
        # non-sparse: drop terms whose zero fraction exceeds the threshold
        n = len(train_idx)
        df = Counter()
        for i in train_idx:
            df.update(counters[i].keys())
        return sorted(t for t in observed if (n - df[t]) / n <= self.sparse_threshold)

    def fit(self, prepared: PreparedCorpus, train_idx) -> "FeaturePipeline":
        cfg = self.cfg
        train_idx = list(train_idx)
        self.n_train = len(train_idx)
        train_labels = [prepared.labels[i] for i in train_idx]

        if cfg.use_text:
            counters = prepared.counters_for(cfg.synonyms)
            candidates = self._candidate_terms(prepared, counters, train_idx, train_labels)
            index = {t: j for j, t in enumerate(candidates)}
            rows = tuple(
                {index[t]: float(c) for t, c in counters[i].items() if t in index}
                for i in train_idx
            )
            m = TermMatrix(vocabulary=tuple(candidates), rows=rows, value_kind=ValueKind.COUNT)
            self.selected_terms = select_terms(m, train_labels, cfg)
            df = Counter()
            selected = set(self.selected_terms)
            for i in train_idx:
                df.update(t for t in counters[i] if t in selected)
            self.idf = {
                t: math.log2(self.n_train / df[t]) if df[t] else 0.0
                for t in self.selected_terms
            }
        else:
            self.selected_terms = ()
            self.idf = {}
        self._term_index = {t: j for j, t in enumerate(self.selected_terms)}
        self._idf_arr = np.array([self.idf[t] for t in self.selected_terms])

        if cfg.use_account and cfg.account_measures is AccountMode.CATEGORICAL:
            rows = np.stack([prepared.measures[i].as_array() for i in train_idx])
            self.cuts = quartile_cuts(rows)

        account_names = ACCOUNT_FIELDS if cfg.use_account else ()
        self.schema = schema_fingerprint(
            self.selected_terms,
            account_names,
            cfg.sentiment is not SentimentMode.NONE,
            extra="|".join(sorted(cfg.as_dict().values())),
        )
        return self

    def transform(self, prepared: PreparedCorpus, idx) -> FeatureSet:
        cfg = self.cfg
        idx = list(idx)
        user_ids = [prepared.user_ids[i] for i in idx]
        labels = [prepared.labels[i] for i in idx]

        counters = prepared.counters_for(cfg.synonyms)
        terms = np.zeros((len(idx), len(self.selected_terms)))
        tindex = self._term_index
        for r, i in enumerate(idx):
            for t, count in counters[i].items():
                j = tindex.get(t)
                if j is not None:
                    terms[r, j] = count * self._idf_arr[j] if cfg.tfidf else count

        if cfg.use_account:
            measures = [prepared.measures[i] for i in idx]
            account = transform_measures(measures, cfg.account_measures, cuts=self.cuts)
            account_names = ACCOUNT_FIELDS
        else:
            account = np.zeros((len(idx), 0))
            account_names = ()

        sentiment_part = None
        if cfg.sentiment is not SentimentMode.NONE:
            values = np.array(
                [user_sentiment(prepared.tweet_scores[i], cfg.sentiment) for i in idx]
            )
            sentiment_part = (user_ids, values)

        return assemble_features(
            cfg,
            (user_ids, self.selected_terms, terms),
            (user_ids, account_names, account),
            sentiment_part,
            (user_ids, labels),
        )
