"""Feature families: term selection, sentiment, account measures, assembly.

Implements entropy-based information gain for term ranking, lexicon-driven
sentence sentiment with a two-token negation window, per-user activity
measures with three encodings (raw, per-post normalized, quartile codes),
the depressed-users sentiment vocabulary restriction, and the final
per-user feature vector assembly under a frozen schema fingerprint.
"""

from __future__ import annotations

import hashlib
import json
import math
import warnings
from dataclasses import dataclass
from enum import Enum
from itertools import product

import numpy as np

from .corpus import Label, UserRecord
from .errors import DegenerateQuartiles, EmptyVocab, InvalidDistribution, SchemaMismatch
from .matrix import TermMatrix
from .porter import stem

__all__ = [
    "Selector",
    "SentimentMode",
    "UseWords",
    "AccountMode",
    "FeatureConfig",
    "SentimentLexicon",
    "AccountMeasures",
    "ACCOUNT_FIELDS",
    "FeatureVector",
    "FeatureSet",
    "entropy",
    "info_gain",
    "select_terms",
    "tweet_sentiment",
    "user_sentiment",
    "build_dept_sent_vocab",
    "compute_account_measures",
    "interpolated_quantile",
    "quartile_cuts",
    "transform_measures",
    "assemble_features",
]


class Selector(Enum):
    INFO_GAIN = "infogain"
    MOST_FREQUENT = "mostfreq"


class SentimentMode(Enum):
    AVG = "avg"
    MIXED = "mixed"
    NONE = "none"


class UseWords(Enum):
    DEPT_SENT = "deptsent"
    NON_SPARSE = "nonsparse"


class AccountMode(Enum):
    AS_IS = "asis"
    NORM = "norm"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class FeatureConfig:
    """One point in the feature-variant grid.

    The first eight fields are the grid dimensions; ``use_text`` and
    ``use_account`` are ablation switches outside the grid (both default on).
    """

    self_center: bool = True
    tfidf: bool = True
    selector: Selector = Selector.INFO_GAIN
    selector_k: int = 200
    sentiment: SentimentMode = SentimentMode.MIXED
    use_words: UseWords = UseWords.DEPT_SENT
    account_measures: AccountMode = AccountMode.CATEGORICAL
    synonyms: bool = True
    use_text: bool = True
    use_account: bool = True

    def __post_init__(self):
        if self.selector_k < 1:
            raise ValueError("selector_k must be positive")
        if not (self.use_text or self.use_account):
            raise ValueError("at least one of use_text / use_account must be on")

    def as_dict(self) -> dict[str, str]:
        return {
            "self_center": str(self.self_center).lower(),
            "tfidf": str(self.tfidf).lower(),
            "selector": self.selector.value,
            "selector_k": str(self.selector_k),
            "sentiment": self.sentiment.value,
            "use_words": self.use_words.value,
            "account_measures": self.account_measures.value,
            "synonyms": str(self.synonyms).lower(),
        }

    @classmethod
    def grid(cls, selector_k: int = 200) -> list["FeatureConfig"]:
        """All combinations of the grid dimensions (2*2*2*3*2*3*2 = 288)."""
        configs = []
        for sc, tf, sel, sent, uw, am, syn in product(
            (True, False),
            (True, False),
            Selector,
            SentimentMode,
            UseWords,
            AccountMode,
            (True, False),
        ):
            configs.append(
                cls(
                    self_center=sc,
                    tfidf=tf,
                    selector=sel,
                    selector_k=selector_k,
                    sentiment=sent,
                    use_words=uw,
                    account_measures=am,
                    synonyms=syn,
                )
            )
        return configs


# ---------------------------------------------------------------------------
# Entropy and information gain
# ---------------------------------------------------------------------------

def entropy(p) -> float:
    """Shannon entropy in bits of a probability distribution.

    Raises InvalidDistribution unless every p_i >= 0 and sum(p) = 1 within
    1e-9.  The 0*log(0) terms contribute zero.
    """
    p = list(p)
    if any(x < 0 for x in p):
        raise InvalidDistribution("negative probability")
    if abs(sum(p) - 1.0) > 1e-9:
        raise InvalidDistribution(f"probabilities sum to {sum(p)!r}, not 1")
    return -sum(x * math.log2(x) for x in p if x > 0)


def _entropy_of_counts(counts) -> float:
    total = sum(counts)
    if total == 0:
        return 0.0
    return -sum((c / total) * math.log2(c / total) for c in counts if c > 0)


def _ig_from_counts(pos_present: int, neg_present: int, n_pos: int, n_neg: int) -> float:
    n = n_pos + n_neg
    present = pos_present + neg_present
    absent = n - present
    h_labels = _entropy_of_counts((n_pos, n_neg))
    h_given_present = _entropy_of_counts((pos_present, neg_present))
    h_given_absent = _entropy_of_counts((n_pos - pos_present, n_neg - neg_present))
    return h_labels - (present / n) * h_given_present - (absent / n) * h_given_absent


def info_gain(presence, labels) -> float:
    """Reduction in label entropy from conditioning on a presence bit.

    ``H(labels) - P(present) H(labels | present) - P(absent) H(labels | absent)``
    for a binary label vector, in bits.
    """
    presence = list(presence)
    labels = list(labels)
    if len(presence) != len(labels) or not labels:
        raise ValueError("presence and labels must align and be non-empty")
    classes = sorted({str(l) for l in labels})
    pos_class = classes[0]
    n_pos = sum(1 for l in labels if str(l) == pos_class)
    n_neg = len(labels) - n_pos
    pos_present = sum(1 for b, l in zip(presence, labels) if b and str(l) == pos_class)
    neg_present = sum(1 for b, l in zip(presence, labels) if b and str(l) != pos_class)
    return _ig_from_counts(pos_present, neg_present, n_pos, n_neg)


def select_terms(m: TermMatrix, labels, cfg: FeatureConfig) -> tuple[str, ...]:
    """Rank terms by the configured selector and keep the top selector_k.

    Information gain uses presence (count > 0); most-frequent uses the total
    corpus count.  Ties break toward the lexicographically smaller term.
    The selection is computed on the rows given (the training fold) and must
    be applied unchanged to test rows.
    """
    if m.n_rows != len(labels):
        raise ValueError("matrix rows must align with labels")
    if cfg.selector is Selector.MOST_FREQUENT:
        totals = [0.0] * m.n_terms
        for row in m.rows:
            for col, v in row.items():
                totals[col] += v
        scores = totals
    else:
        classes = sorted({str(l) for l in labels})
        pos_class = classes[0]
        n_pos = sum(1 for l in labels if str(l) == pos_class)
        n_neg = len(labels) - n_pos
        pos_present = [0] * m.n_terms
        neg_present = [0] * m.n_terms
        for row, label in zip(m.rows, labels):
            bucket = pos_present if str(label) == pos_class else neg_present
            for col in row:
                bucket[col] += 1
        scores = [
            _ig_from_counts(pos_present[col], neg_present[col], n_pos, n_neg)
            for col in range(m.n_terms)
        ]
    order = sorted(range(m.n_terms), key=lambda col: (-scores[col], m.vocabulary[col]))
    return tuple(m.vocabulary[col] for col in order[: cfg.selector_k])


# ---------------------------------------------------------------------------
# Sentiment
# ---------------------------------------------------------------------------

NEGATION_WINDOW = 2


@dataclass(frozen=True)
class SentimentLexicon:
    """Polarity lexicon plus negation words, keyed by stemmed token."""

    polarity: dict[str, float]
    negators: frozenset[str]

    def __post_init__(self):
        bad = {t: p for t, p in self.polarity.items() if abs(p) > 1}
        if bad:
            raise ValueError(f"polarity out of [-1, 1]: {bad}")

    @classmethod
    def load(cls, lexicon_path, negators_path) -> "SentimentLexicon":
        entries: dict[str, tuple[float, str]] = {}
        with open(lexicon_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                term, raw = line.split("\t")
                term = term.strip().lower()
                value = float(raw)
                key = stem(term)
                # two surface terms can share a stem: keep the stronger
                # polarity, ties resolved by the smaller surface term
                if (
                    key not in entries
                    or abs(value) > abs(entries[key][0])
                    or (abs(value) == abs(entries[key][0]) and term < entries[key][1])
                ):
                    entries[key] = (value, term)
        negators = set()
        with open(negators_path, encoding="utf-8") as fh:
            for line in fh:
                word = line.split("#", 1)[0].strip().lower()
                if word:
                    negators.add(stem(word))
        return cls(
            polarity={k: v for k, (v, _) in entries.items()},
            negators=frozenset(negators),
        )


def tweet_sentiment(tokens, spans, lex: SentimentLexicon) -> tuple[float, float]:
    """Positive and negative mass of one tweet from sentence sentiment.

    Per sentence, lexicon hits are summed; a hit is sign-flipped when a
    negator occurs within the two preceding tokens of the same sentence.
    Returns (pos, neg) where pos sums the positive sentence scores and neg
    the magnitudes of the negative ones.
    """
    pos = 0.0
    neg = 0.0
    for s, e in spans:
        score = 0.0
        for i in range(s, e):
            polarity = lex.polarity.get(tokens[i])
            if polarity is None:
                continue
            window = tokens[max(s, i - NEGATION_WINDOW):i]
            if any(t in lex.negators for t in window):
                polarity = -polarity
            score += polarity
        if score >= 0:
            pos += score
        else:
            neg += -score
    return pos, neg


def user_sentiment(tweet_scores, mode: SentimentMode) -> float:
    """Aggregate per-tweet (pos, neg) pairs into one user-level score.

    Avg averages the signed scores.  Mixed treats a tweet carrying both
    polarities as negative: it contributes -neg instead of pos - neg.
    """
    scores = list(tweet_scores)
    if not scores:
        raise ValueError("need at least one tweet")
    if mode is SentimentMode.AVG:
        return sum(p - n for p, n in scores) / len(scores)
    if mode is SentimentMode.MIXED:
        total = 0.0
        for p, n in scores:
            total += -n if (p > 0 and n > 0) else (p - n)
        return total / len(scores)
    raise ValueError(f"no aggregate defined for sentiment mode {mode}")


def build_dept_sent_vocab(docs, labels, lex: SentimentLexicon) -> frozenset[str]:
    """Lexicon terms observed in at least one depressed user's tokens.

    ``docs`` and ``labels`` are aligned over training users only; test users
    must never reach this function.  Raises EmptyVocab when no depressed
    user contains any lexicon term.
    """
    vocab: set[str] = set()
    for doc, label in zip(docs, labels):
        if label is not Label.DEPRESSED:
            continue
        tokens = doc.tokens if hasattr(doc, "tokens") else doc
        vocab.update(t for t in tokens if t in lex.polarity)
    if not vocab:
        raise EmptyVocab("no sentiment word found in depressed training users")
    return frozenset(vocab)


# ---------------------------------------------------------------------------
# Account measures
# ---------------------------------------------------------------------------

ACCOUNT_FIELDS = (
    "posts_count",
    "posts_per_day",
    "retweet_fraction",
    "reply_fraction",
    "mentions_per_post",
    "links_per_post",
    "followers_count",
    "following_count",
    "night_post_fraction",
)

# fields rescaled by posts_count under the Norm encoding; fractions and
# per-post rates are already normalized
_NORM_FIELDS = ("followers_count", "following_count")

NIGHT_HOURS = range(0, 6)

SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class AccountMeasures:
    posts_count: int
    posts_per_day: float
    retweet_fraction: float
    reply_fraction: float
    mentions_per_post: float
    links_per_post: float
    followers_count: int
    following_count: int
    night_post_fraction: float

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in ACCOUNT_FIELDS], dtype=float)


def compute_account_measures(user: UserRecord) -> AccountMeasures:
    """Activity statistics for one (already filtered) user."""
    n = len(user.tweets)
    stamps = [t.created_at for t in user.tweets]
    span_days = max(1.0, (max(stamps) - min(stamps)).total_seconds() / SECONDS_PER_DAY)
    return AccountMeasures(
        posts_count=n,
        posts_per_day=n / span_days,
        retweet_fraction=sum(t.is_retweet for t in user.tweets) / n,
        reply_fraction=sum(t.is_reply for t in user.tweets) / n,
        mentions_per_post=sum(t.mention_count for t in user.tweets) / n,
        links_per_post=sum(t.link_count for t in user.tweets) / n,
        followers_count=user.followers_count,
        following_count=user.following_count,
        night_post_fraction=sum(t.created_at.hour in NIGHT_HOURS for t in user.tweets) / n,
    )


def interpolated_quantile(values, p: float) -> float:
    """Order-p quantile via h = (n-1)p + 1 with linear interpolation."""
    xs = sorted(values)
    n = len(xs)
    if n == 0:
        raise ValueError("empty sample")
    h = (n - 1) * p + 1
    lo = int(math.floor(h))
    hi = min(lo + 1, n)
    frac = h - lo
    return xs[lo - 1] + frac * (xs[hi - 1] - xs[lo - 1])


def quartile_cuts(rows: np.ndarray) -> np.ndarray:
    """Q1/Q2/Q3 cut points per column, computed on training rows only."""
    rows = np.asarray(rows, dtype=float)
    if rows.shape[0] < 4:
        raise ValueError("need at least 4 rows for quartile coding")
    cuts = np.empty((3, rows.shape[1]))
    for j in range(rows.shape[1]):
        col = rows[:, j]
        for i, p in enumerate((0.25, 0.5, 0.75)):
            cuts[i, j] = interpolated_quantile(col, p)
        if cuts[0, j] == cuts[2, j]:
            warnings.warn(
                f"column {j} has Q1 = Q3; quartile codes degenerate",
                DegenerateQuartiles,
                stacklevel=2,
            )
    return cuts


def transform_measures(measures, mode: AccountMode, cuts: np.ndarray | None = None) -> np.ndarray:
    """Dense account-feature rows under the requested encoding.

    AsIs passes raw fields through.  Norm divides the count-like fields by
    posts_count.  Categorical maps each field to an ordinal 0..3 against
    Q1/Q2/Q3 cut points; pass ``cuts`` frozen from the training fold, or
    leave None to compute them from these rows.
    """
    rows = np.stack([m.as_array() for m in measures])
    if mode is AccountMode.AS_IS:
        return rows
    if mode is AccountMode.NORM:
        out = rows.copy()
        posts = rows[:, ACCOUNT_FIELDS.index("posts_count")]
        for name in _NORM_FIELDS:
            j = ACCOUNT_FIELDS.index(name)
            out[:, j] = rows[:, j] / posts
        return out
    if mode is AccountMode.CATEGORICAL:
        if cuts is None:
            cuts = quartile_cuts(rows)
        codes = np.zeros_like(rows)
        for j in range(rows.shape[1]):
            q1, q2, q3 = cuts[:, j]
            col = rows[:, j]
            codes[:, j] = np.select(
                [col <= q1, col <= q2, col <= q3], [0, 1, 2], default=3
            )
        return codes
    raise ValueError(f"unknown account mode {mode}")


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureVector:
    """Assembled classifier input for one user."""

    user_id: str
    term_features: tuple[tuple[int, float], ...]
    account_features: tuple[float, ...]
    sentiment_feature: float | None
    label: Label
    schema: str


@dataclass(frozen=True)
class FeatureSet:
    """Aligned feature blocks for a list of users under one schema."""

    user_ids: tuple[str, ...]
    term_names: tuple[str, ...]
    terms: np.ndarray            # n x t, term counts or tf-idf weights
    account_names: tuple[str, ...]
    account: np.ndarray          # n x a dense block
    sentiment: np.ndarray | None  # length n, or None when sentiment is off
    labels: tuple[Label, ...]
    schema: str

    def __len__(self) -> int:
        return len(self.user_ids)

    @property
    def y(self) -> np.ndarray:
        """Labels as +1 (depressed) / -1 (control)."""
        return np.array([1 if l is Label.DEPRESSED else -1 for l in self.labels])

    @property
    def dense(self) -> np.ndarray:
        """Account block with the sentiment column appended when present."""
        if self.sentiment is None:
            return self.account
        return np.hstack([self.account, self.sentiment.reshape(-1, 1)])

    @property
    def dense_names(self) -> tuple[str, ...]:
        if self.sentiment is None:
            return self.account_names
        return self.account_names + ("sentiment",)

    @property
    def combined(self) -> np.ndarray:
        """Terms and dense block side by side (classifier design matrix)."""
        return np.hstack([self.terms, self.dense])

    def vectors(self) -> list[FeatureVector]:
        out = []
        for i, uid in enumerate(self.user_ids):
            nz = np.nonzero(self.terms[i])[0]
            out.append(
                FeatureVector(
                    user_id=uid,
                    term_features=tuple((int(j), float(self.terms[i, j])) for j in nz),
                    account_features=tuple(float(v) for v in self.account[i]),
                    sentiment_feature=(
                        None if self.sentiment is None else float(self.sentiment[i])
                    ),
                    label=self.labels[i],
                    schema=self.schema,
                )
            )
        return out

    def row_from_vector(self, fv: FeatureVector) -> np.ndarray:
        """Materialize one FeatureVector into the combined design row."""
        if fv.schema != self.schema:
            raise SchemaMismatch(
                f"feature vector schema {fv.schema} != set schema {self.schema}"
            )
        return _vector_row(fv, len(self.term_names))


def _vector_row(fv: FeatureVector, n_terms: int) -> np.ndarray:
    terms = np.zeros(n_terms)
    for j, v in fv.term_features:
        terms[j] = v
    dense = list(fv.account_features)
    if fv.sentiment_feature is not None:
        dense.append(fv.sentiment_feature)
    return np.concatenate([terms, np.array(dense, dtype=float)])


def schema_fingerprint(term_names, account_names, sentiment_on: bool, extra: str = "") -> str:
    payload = json.dumps(
        {
            "terms": list(term_names),
            "account": list(account_names),
            "sentiment": sentiment_on,
            "extra": extra,
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def assemble_features(
    cfg: FeatureConfig,
    term_part,      # (user_ids, term_names, n x t array)
    account_part,   # (user_ids, field_names, n x a array)
    sentiment_part, # (user_ids, length-n array) or None
    label_part,     # (user_ids, labels)
) -> FeatureSet:
    """Merge aligned feature blocks into one FeatureSet.

    Raises SchemaMismatch when any component's user order disagrees.
    """
    term_ids, term_names, terms = term_part
    acct_ids, account_names, account = account_part
    label_ids, labels = label_part
    orders = [tuple(term_ids), tuple(acct_ids), tuple(label_ids)]
    sentiment = None
    if cfg.sentiment is not SentimentMode.NONE:
        if sentiment_part is None:
            raise ValueError("sentiment mode is on but no sentiment block given")
        sent_ids, sentiment = sentiment_part
        orders.append(tuple(sent_ids))
        sentiment = np.asarray(sentiment, dtype=float)
    if len(set(orders)) != 1:
        raise SchemaMismatch("component user orders disagree")
    schema = schema_fingerprint(term_names, account_names, sentiment is not None)
    return FeatureSet(
        user_ids=tuple(term_ids),
        term_names=tuple(term_names),
        terms=np.asarray(terms, dtype=float),
        account_names=tuple(account_names),
        account=np.asarray(account, dtype=float),
        sentiment=sentiment,
        labels=tuple(labels),
        schema=schema,
    )
