"""Seeded synthetic-corpus generator with plantable depression signals.

Depressed users draw tweet words from a depression pool with a configurable
per-tweet probability, use first-person pronouns at a boosted rate, and get
night-hour and posting-rate distributions shifted by an activity signal.
Control users never emit the substring "depress".  With all signal knobs at
zero the two classes are generated from identical distributions.  Output is
fully determined by the seed and parameters, byte for byte.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import InvalidParams
from .resources import bundled_path

__all__ = ["SynthParams", "generate", "load_pool"]

REFERENCE_END = datetime(2024, 6, 30, tzinfo=timezone.utc)
BASE_WINDOW_DAYS = 90.0
BASE_NIGHT_PROB = 0.1
BASE_PRONOUN_PROB = 0.15
WORDS_PER_TWEET = (5, 12)


@dataclass(frozen=True)
class SynthParams:
    n_users: int = 200
    depressed_fraction: float = 0.5
    tweets_min: int = 8
    tweets_max: int = 30
    s_text: float = 0.0
    pronoun_boost: float = 0.0
    s_act: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        if self.n_users < 4:
            raise InvalidParams("n_users must be at least 4")
        for name in ("depressed_fraction", "s_text", "pronoun_boost", "s_act"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidParams(f"{name} must lie in [0, 1]")
        n_dep = int(self.n_users * self.depressed_fraction)
        if n_dep < 1 or n_dep >= self.n_users:
            raise InvalidParams("depressed_fraction must leave both classes non-empty")
        if self.tweets_min < 5:
            raise InvalidParams("tweets_min must be >= 5 so users survive filtering")
        if self.tweets_max < self.tweets_min:
            raise InvalidParams("tweets_max must be >= tweets_min")


def load_pool(name: str) -> list[str]:
    words = []
    with open(bundled_path(name), encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip().lower()
            if word:
                words.append(word)
    return words


def _tweet_text(rng, n_words, pronoun_prob, neutral, pronouns, signal, depression):
    words = [
        rng.choice(pronouns) if rng.random() < pronoun_prob else rng.choice(neutral)
        for _ in range(n_words)
    ]
    if signal:
        for pos in rng.sample(range(n_words), rng.randint(1, min(3, n_words))):
            words[pos] = rng.choice(depression)
    return " ".join(words) + "."


def _timestamp(rng, window_days, night_prob) -> datetime:
    day_offset = rng.uniform(0.0, window_days)
    hour = rng.randrange(0, 6) if rng.random() < night_prob else rng.randrange(6, 24)
    base = REFERENCE_END - timedelta(days=day_offset)
    return base.replace(hour=hour, minute=rng.randrange(60), second=rng.randrange(60))


def generate(params: SynthParams, path) -> Path:
    """Write a corpus file in the standard JSON-lines format."""
    params.validate()
    rng = random.Random(params.seed)
    neutral = load_pool("neutral_pool.txt")
    depression = load_pool("depression_pool.txt")
    pronouns = load_pool("pronouns.txt")

    n_dep = int(params.n_users * params.depressed_fraction)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for u in range(params.n_users):
            depressed = u < n_dep
            window = BASE_WINDOW_DAYS * (1.0 - 0.5 * params.s_act) if depressed else BASE_WINDOW_DAYS
            night = BASE_NIGHT_PROB + 0.5 * params.s_act if depressed else BASE_NIGHT_PROB
            pronoun_prob = BASE_PRONOUN_PROB + (params.pronoun_boost if depressed else 0.0)
            n_tweets = rng.randint(params.tweets_min, params.tweets_max)
            tweets = []
            for _ in range(n_tweets):
                # draw unconditionally so the null-signal RNG stream is
                # identical for both classes
                roll = rng.random()
                signal = depressed and roll < params.s_text
                text = _tweet_text(
                    rng,
                    rng.randint(*WORDS_PER_TWEET),
                    pronoun_prob,
                    neutral,
                    pronouns,
                    signal,
                    depression,
                )
                if not depressed:
                    assert "depress" not in text.lower()
                tweets.append(
                    {
                        "text": text,
                        "created_at": _timestamp(rng, window, night).strftime(
                            "%Y-%m-%dT%H:%M:%SZ"
                        ),
                        "is_retweet": rng.random() < 0.15,
                        "is_reply": rng.random() < 0.2,
                        "mentions": rng.randint(0, 2),
                        "links": 1 if rng.random() < 0.2 else 0,
                    }
                )
            tweets.sort(key=lambda t: t["created_at"], reverse=True)
            record = {
                "user_id": f"u{u:04d}",
                "label": "depressed" if depressed else "control",
                "followers": rng.randint(20, 500),
                "following": rng.randint(20, 500),
                "tweets": tweets,
            }
            fh.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
    return path
