"""Bundled and user-supplied resource files (stopwords, lexicon, thesaurus)."""

from __future__ import annotations

from dataclasses import dataclass
from importlib.resources import files

from .features import SentimentLexicon
from .matrix import Thesaurus
from .textprep import load_stopwords

_DATA = files("ddacf_kit") / "data"


def bundled_path(name: str):
    return _DATA / name


@dataclass(frozen=True)
class Resources:
    stopwords: frozenset[str]
    lexicon: SentimentLexicon
    thesaurus: Thesaurus


def load_resources(
    stopwords_path=None,
    lexicon_path=None,
    negators_path=None,
    thesaurus_path=None,
) -> Resources:
    """Load resource files, falling back to the bundled defaults."""
    return Resources(
        stopwords=load_stopwords(stopwords_path or bundled_path("stopwords.txt")),
        lexicon=SentimentLexicon.load(
            lexicon_path or bundled_path("lexicon.tsv"),
            negators_path or bundled_path("negators.txt"),
        ),
        thesaurus=Thesaurus.load(thesaurus_path or bundled_path("thesaurus.tsv")),
    )


def default_resources() -> Resources:
    return load_resources()
