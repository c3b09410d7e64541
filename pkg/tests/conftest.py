import json
from datetime import datetime, timedelta, timezone

import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

from ddacf_kit.corpus import Corpus, Label, Tweet, UserRecord
from ddacf_kit.resources import default_resources

BASE_TIME = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)


def make_tweet(text, hours_ago=0.0, is_retweet=False, is_reply=False, mentions=0, links=0):
    return Tweet(
        text=text,
        created_at=BASE_TIME - timedelta(hours=hours_ago),
        is_retweet=is_retweet,
        is_reply=is_reply,
        mention_count=mentions,
        link_count=links,
    )


def make_user(user_id, label, texts, followers=10, following=20, **tweet_kwargs):
    tweets = tuple(
        make_tweet(text, hours_ago=float(i), **tweet_kwargs)
        for i, text in enumerate(texts)
    )
    return UserRecord(
        user_id=user_id,
        label=label,
        tweets=tweets,
        followers_count=followers,
        following_count=following,
    )


def corpus_record(user_id, label, texts, followers=10, following=20):
    tweets = [
        {
            "text": text,
            "created_at": (BASE_TIME - timedelta(hours=i)).strftime("%Y-%m-%dT%H:%M:%SZ"),
            "is_retweet": False,
            "is_reply": False,
            "mentions": 0,
            "links": 0,
        }
        for i, text in enumerate(texts)
    ]
    return {
        "user_id": user_id,
        "label": label,
        "followers": followers,
        "following": following,
        "tweets": tweets,
    }


def write_corpus(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")
    return path


@pytest.fixture(scope="session")
def resources():
    return default_resources()


@pytest.fixture
def tiny_corpus():
    users = (
        make_user("d1", Label.DEPRESSED, ["i feel sad today"] * 6),
        make_user("d2", Label.DEPRESSED, ["crying all night"] * 6),
        make_user("c1", Label.CONTROL, ["great game tonight"] * 6),
        make_user("c2", Label.CONTROL, ["coffee and music"] * 6),
    )
    return Corpus(users=users)
