import random

import numpy as np
import pytest

from ddacf_kit.corpus import Corpus, Label
from ddacf_kit.errors import LengthMismatch, OneClassOnly, TooFewExamples
from ddacf_kit.evaluation import (
    ConfusionMatrix,
    ModelSpec,
    confusion,
    cross_validate,
    metrics,
    model_spec,
    roc_auc,
    run_cv,
    run_holdout,
    stratified_folds,
)
from ddacf_kit.features import FeatureConfig, SentimentMode, UseWords

from conftest import make_user

D, N = Label.DEPRESSED, Label.CONTROL

# tiny fixtures have constant account fields, so quartile coding degenerates
pytestmark = pytest.mark.filterwarnings("ignore::ddacf_kit.errors.DegenerateQuartiles")


def rank_statistic_auc(scores, labels):
    """Tie-corrected pairwise ranking oracle via midranks."""
    from scipy.stats import rankdata

    scores = np.asarray(scores, dtype=float)
    pos = np.array([l == D for l in labels])
    ranks = rankdata(scores)
    n_pos = pos.sum()
    n_neg = len(labels) - n_pos
    return (ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg)


class TestConfusion:
    def test_perfect(self):
        cm = confusion([D, N], [D, N])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (1, 1, 0, 0)

    def test_all_false_positive(self):
        cm = confusion([D, D, D], [N, N, N])
        assert (cm.tp, cm.tn, cm.fp, cm.fn) == (0, 0, 3, 0)

    def test_mixed_tally(self):
        cm = confusion([D, D, N, N], [D, N, D, N])
        assert (cm.tp, cm.fp, cm.fn, cm.tn) == (1, 1, 1, 1)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            confusion([D], [D, N])

    def test_table_layout(self):
        cm = ConfusionMatrix(tp=1, fp=2, fn=3, tn=4)
        assert cm.as_table() == [[4, 2], [3, 1]]
        assert cm.total == 10


class TestMetrics:
    # (precision, recall) -> published F1, reproduced by the formula
    PAPER_ROWS = [
        (0.73913, 0.85, 0.790698),
        (0.5625, 0.473684, 0.514286),
        (1.0, 0.3, 0.461538),
        (0.636364, 0.388889, 0.482759),
        (0.684211, 0.722222, 0.702703),
        (0.736842, 0.777778, 0.756757),
        (0.653846, 0.809524, 0.723404),
        (0.705882, 0.631579, 0.666667),
        (0.473684, 0.692308, 0.5625),
    ]

    @pytest.mark.parametrize("p,r,f1", PAPER_ROWS)
    def test_f1_identity_rows(self, p, r, f1):
        assert 2 * p * r / (p + r) == pytest.approx(f1, abs=1e-5)

    def test_metrics_from_cm(self):
        cm = ConfusionMatrix(tp=17, fp=6, fn=3, tn=14)
        vals = metrics(cm)
        assert vals.accuracy == pytest.approx(31 / 40)
        assert vals.precision == pytest.approx(17 / 23)
        assert vals.recall == pytest.approx(17 / 20)
        assert vals.f1 == pytest.approx(
            2 * vals.precision * vals.recall / (vals.precision + vals.recall)
        )
        assert not vals.undefined

    def test_undefined_precision_flagged(self):
        cm = ConfusionMatrix(tp=0, fp=0, fn=2, tn=2)
        vals = metrics(cm)
        assert vals.precision == 0.0
        assert "precision" in vals.undefined
        assert "f1" in vals.undefined

    def test_recall_equals_tp_rate(self):
        rng = random.Random(6)
        for _ in range(30):
            tp, fp, fn, tn = (rng.randint(0, 20) for _ in range(4))
            if tp + fn == 0 or tp + fp + fn + tn == 0:
                continue
            cm = ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)
            assert metrics(cm).recall == pytest.approx(tp / (tp + fn))

    def test_mean_inequality_chain(self):
        rng = random.Random(14)
        for _ in range(100):
            cm = ConfusionMatrix(
                tp=rng.randint(1, 20), fp=rng.randint(0, 20),
                fn=rng.randint(0, 20), tn=rng.randint(0, 20),
            )
            vals = metrics(cm)
            p, r = vals.precision, vals.recall
            if p == 0 or r == 0:
                continue
            harmonic = vals.f1
            geometric = (p * r) ** 0.5
            arithmetic = (p + r) / 2
            assert harmonic <= geometric + 1e-12
            assert geometric <= arithmetic + 1e-12


class TestRocAuc:
    def test_perfect_ranking(self):
        _, auc = roc_auc([3, 2, 1, 0], [D, D, N, N])
        assert auc == 1.0

    def test_inverted_ranking(self):
        _, auc = roc_auc([0, 1, 2, 3], [D, D, N, N])
        assert auc == 0.0

    def test_three_quarters(self):
        _, auc = roc_auc([3, 2, 1, 0], [D, N, D, N])
        assert auc == pytest.approx(0.75)

    def test_endpoints_and_monotone(self):
        rng = random.Random(10)
        for _ in range(30):
            n = rng.randint(2, 40)
            labels = [D, N] + [rng.choice([D, N]) for _ in range(n - 2)]
            scores = [rng.choice([0.0, 0.5, 1.0, rng.random()]) for _ in range(n)]
            points, _ = roc_auc(scores, labels)
            assert points[0] == (0.0, 0.0)
            assert points[-1] == (1.0, 1.0)
            for (x0, y0), (x1, y1) in zip(points, points[1:]):
                assert x1 >= x0 and y1 >= y0

    def test_matches_rank_statistic_with_ties(self):
        rng = random.Random(11)
        for _ in range(50):
            n = rng.randint(2, 200)
            labels = [D, N] + [rng.choice([D, N]) for _ in range(n - 2)]
            # heavy ties: few distinct score levels
            levels = [rng.random() for _ in range(rng.randint(1, 5))]
            scores = [rng.choice(levels) for _ in range(n)]
            _, auc = roc_auc(scores, labels)
            assert auc == pytest.approx(rank_statistic_auc(scores, labels), abs=1e-9)

    def test_one_class_only(self):
        with pytest.raises(OneClassOnly):
            roc_auc([1, 2], [D, D])

    def test_random_scores_near_half(self):
        rng = random.Random(12)
        inside = 0
        for _ in range(100):
            labels = [D] * 500 + [N] * 500
            scores = [rng.random() for _ in range(1000)]
            _, auc = roc_auc(scores, labels)
            inside += 0.4 <= auc <= 0.6
        assert inside >= 99


class TestStratifiedFolds:
    def test_exact_divisibility(self):
        labels = [D] * 10 + [N] * 10
        folds = stratified_folds(labels, k=10, seed=3)
        for fold in folds:
            assert sum(labels[i] is D for i in fold) == 1
            assert sum(labels[i] is N for i in fold) == 1

    def test_same_seed_same_folds(self):
        labels = [D] * 13 + [N] * 17
        assert stratified_folds(labels, 5, seed=9) == stratified_folds(labels, 5, seed=9)

    def test_partition(self):
        labels = [D] * 13 + [N] * 17
        folds = stratified_folds(labels, 5, seed=4)
        flat = sorted(i for fold in folds for i in fold)
        assert flat == list(range(30))

    def test_proportions_within_one(self):
        labels = [D] * 23 + [N] * 37
        folds = stratified_folds(labels, 10, seed=5)
        pos_counts = [sum(labels[i] is D for i in fold) for fold in folds]
        assert max(pos_counts) - min(pos_counts) <= 1

    def test_k_lowered_with_warning(self):
        labels = [D] * 3 + [N] * 20
        with pytest.warns(UserWarning, match="lowering"):
            folds = stratified_folds(labels, 10, seed=6)
        assert len(folds) == 3

    def test_too_few_examples(self):
        with pytest.raises(TooFewExamples):
            stratified_folds([D, N, N], k=2, seed=0)


def majority_spec():
    """Trainer that always predicts the training-majority class."""

    class MajorityModel:
        def __init__(self, schema, n_terms, score):
            self.schema = schema
            self.n_terms = n_terms
            self.threshold = 0.0
            self._score = score

        def score_rows(self, X):
            return np.full(X.shape[0], self._score)

    def train(fs):
        pos = sum(1 for l in fs.labels if l is D)
        score = 1.0 if pos > len(fs.labels) - pos else -1.0
        return MajorityModel(fs.schema, fs.terms.shape[1], score)

    return ModelSpec("majority", train)


@pytest.fixture(scope="module")
def small_corpus():
    rng = random.Random(100)
    words_d = ["gloomy", "alone", "tired", "rain", "night"]
    words_n = ["soccer", "picnic", "market", "sunny", "lunch"]
    users = []
    for i in range(12):
        pool = words_d if i < 6 else words_n
        texts = [
            " ".join(rng.choice(pool) for _ in range(6)) + "."
            for _ in range(8)
        ]
        users.append(make_user(f"u{i}", D if i < 6 else N, texts))
    return Corpus(users=tuple(users))


class TestRunCv:
    def test_majority_learner_accuracy(self, small_corpus, resources):
        # 12 users, 7 D / 5 N after relabeling one user
        users = list(small_corpus.users)
        users[6] = make_user("u6b", D, [t.text for t in users[6].tweets])
        corpus = Corpus(users=tuple(users))
        cfg = FeatureConfig(sentiment=SentimentMode.NONE, use_words=UseWords.NON_SPARSE)
        report = run_cv(corpus, cfg, majority_spec(), k=5, seed=0, resources=resources)
        assert report.accuracy == pytest.approx(7 / 12)

    def test_separable_corpus_svml_perfect(self, small_corpus, resources):
        cfg = FeatureConfig(sentiment=SentimentMode.NONE, use_words=UseWords.NON_SPARSE)
        report = run_cv(
            small_corpus, cfg, model_spec("svml"), k=6, seed=1, resources=resources
        )
        assert report.accuracy == 1.0

    def test_same_seed_byte_identical_report(self, small_corpus, resources):
        cfg = FeatureConfig()
        specs = [model_spec(m) for m in ("nb", "dt")]
        r1 = cross_validate(small_corpus, cfg, specs, k=4, seed=7, resources=resources)
        r2 = cross_validate(small_corpus, cfg, specs, k=4, seed=7, resources=resources)
        for name in ("nb", "dt"):
            assert r1[name].to_dict() == r2[name].to_dict()

    def test_per_fold_reports_present(self, small_corpus, resources):
        cfg = FeatureConfig()
        report = run_cv(small_corpus, cfg, model_spec("nb"), k=4, seed=2, resources=resources)
        assert len(report.per_fold) == 4
        pooled_total = report.cm.total
        assert pooled_total == len(small_corpus)

    def test_holdout_mode(self, small_corpus, resources):
        cfg = FeatureConfig()
        report = run_holdout(
            small_corpus, cfg, model_spec("nb"), fraction=0.25, seed=3, resources=resources
        )
        assert report.cm.total == 4  # quarter of 12 users, stratified to 2+2
        assert len(report.per_fold) == 1
