"""Corpus loading, validation and filtering.

A corpus file is UTF-8 JSON lines, one user per line:

    {"user_id": "u1", "label": "depressed"|"control",
     "followers": 10, "following": 20,
     "tweets": [{"text": "...", "created_at": "2024-01-05T13:00:00Z",
                 "is_retweet": false, "is_reply": false,
                 "mentions": 0, "links": 0}, ...]}

Loading rejects unparseable or invalid lines with the offending line
number, refuses duplicate user ids, excludes control users whose tweets
contain the substring "depress" (with a warning), and errors out if no
valid record remains.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .errors import DuplicateUser, EmptyCorpus, MalformedRecord

__all__ = [
    "Label",
    "Tweet",
    "UserRecord",
    "Corpus",
    "load_corpus",
    "filter_users",
    "control_screen",
    "MIN_POSTS",
    "TWEET_CAP",
]

MIN_POSTS = 5
TWEET_CAP = 3000

CONTROL_SCREEN_SUBSTRING = "depress"


class Label(str, Enum):
    DEPRESSED = "depressed"
    CONTROL = "control"


@dataclass(frozen=True)
class Tweet:
    text: str
    created_at: datetime
    is_retweet: bool = False
    is_reply: bool = False
    mention_count: int = 0
    link_count: int = 0


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    label: Label
    tweets: tuple[Tweet, ...]
    followers_count: int = 0
    following_count: int = 0


@dataclass(frozen=True)
class Corpus:
    users: tuple[UserRecord, ...]

    @property
    def positive_count(self) -> int:
        return sum(1 for u in self.users if u.label is Label.DEPRESSED)

    @property
    def negative_count(self) -> int:
        return sum(1 for u in self.users if u.label is Label.CONTROL)

    def __len__(self) -> int:
        return len(self.users)


def _parse_timestamp(raw, line_no: int) -> datetime:
    if not isinstance(raw, str) or not raw:
        raise MalformedRecord(line_no, "tweet missing created_at timestamp")
    text = raw.replace("Z", "+00:00") if raw.endswith("Z") else raw
    try:
        ts = datetime.fromisoformat(text)
    except ValueError:
        raise MalformedRecord(line_no, f"bad created_at timestamp {raw!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _parse_count(obj: dict, key: str, line_no: int) -> int:
    value = obj.get(key, 0)
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise MalformedRecord(line_no, f"{key} must be a nonnegative integer")
    return value


def _parse_tweet(obj, line_no: int) -> Tweet:
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "tweet entry is not an object")
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise MalformedRecord(line_no, "tweet text is empty")
    return Tweet(
        text=text,
        created_at=_parse_timestamp(obj.get("created_at"), line_no),
        is_retweet=bool(obj.get("is_retweet", False)),
        is_reply=bool(obj.get("is_reply", False)),
        mention_count=_parse_count(obj, "mentions", line_no),
        link_count=_parse_count(obj, "links", line_no),
    )


def _parse_user(line: str, line_no: int) -> UserRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecord(line_no, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise MalformedRecord(line_no, "record is not an object")
    user_id = obj.get("user_id")
    if not isinstance(user_id, str) or not user_id:
        raise MalformedRecord(line_no, "missing user_id")
    raw_label = obj.get("label")
    try:
        label = Label(raw_label)
    except ValueError:
        raise MalformedRecord(line_no, f"missing or unknown label {raw_label!r}") from None
    tweets = obj.get("tweets")
    if not isinstance(tweets, list) or not tweets:
        raise MalformedRecord(line_no, "missing tweets array")
    return UserRecord(
        user_id=user_id,
        label=label,
        tweets=tuple(_parse_tweet(t, line_no) for t in tweets),
        followers_count=_parse_count(obj, "followers", line_no),
        following_count=_parse_count(obj, "following", line_no),
    )


def control_screen(user: UserRecord) -> bool:
    """True iff no tweet of this control user contains "depress" (case-folded)."""
    return not any(
        CONTROL_SCREEN_SUBSTRING in tweet.text.lower() for tweet in user.tweets
    )


def load_corpus(path) -> Corpus:
    """Load and validate a JSON-lines corpus file.

    Raises MalformedRecord naming the offending line, DuplicateUser on a
    repeated user_id, and EmptyCorpus when zero valid records remain.
    Control users failing the "depress" screen are excluded with a warning
    rather than treated as errors.
    """
    path = Path(path)
    users: list[UserRecord] = []
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            user = _parse_user(line, line_no)
            if user.user_id in seen:
                raise DuplicateUser(user.user_id)
            seen.add(user.user_id)
            if user.label is Label.CONTROL and not control_screen(user):
                warnings.warn(
                    f"control user {user.user_id!r} mentions "
                    f'"{CONTROL_SCREEN_SUBSTRING}"; excluded',
                    stacklevel=2,
                )
                continue
            users.append(user)
    if not users:
        raise EmptyCorpus(f"no valid user records in {path}")
    return Corpus(users=tuple(users))


def _truncate_newest(tweets: tuple[Tweet, ...], cap: int) -> tuple[Tweet, ...]:
    if len(tweets) <= cap:
        return tweets
    # keep the cap newest by timestamp, preserving original relative order;
    # ties resolved toward earlier file position
    order = sorted(range(len(tweets)), key=lambda i: (tweets[i].created_at, -i), reverse=True)
    keep = sorted(order[:cap])
    return tuple(tweets[i] for i in keep)


def filter_users(corpus: Corpus, min_posts: int = MIN_POSTS, tweet_cap: int = TWEET_CAP) -> Corpus:
    """Drop users with fewer than min_posts tweets; cap the rest at the newest tweet_cap."""
    if min_posts < 1 or tweet_cap < min_posts:
        raise ValueError("need min_posts >= 1 and tweet_cap >= min_posts")
    survivors = []
    for user in corpus.users:
        if len(user.tweets) < min_posts:
            continue
        tweets = _truncate_newest(user.tweets, tweet_cap)
        survivors.append(
            user if tweets is user.tweets else
            UserRecord(
                user_id=user.user_id,
                label=user.label,
                tweets=tweets,
                followers_count=user.followers_count,
                following_count=user.following_count,
            )
        )
    if not survivors:
        raise EmptyCorpus("no user passed the post-count filter")
    return Corpus(users=tuple(survivors))
