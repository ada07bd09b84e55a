import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retweet_influence.learners import (
    KINDS, LearnerSpec, SingleClassError, evaluate, fit, load_model, predict, save_model, split_and_cv,
    stratified_folds, stratified_split,
)
from retweet_influence.learners.boosting import AdaBoostSAMME
from retweet_influence.learners.evaluation import confusion
from retweet_influence.learners.forest import RandomForest
from retweet_influence.learners.logistic import LogisticRegression, loss_and_grad
from retweet_influence.learners.tree import DecisionTree


def blobs(n=200, sep=6.0, seed=0, dim=2):
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], n // 2)
    X = rng.normal(size=(n, dim))
    X[y == 1, 0] += sep
    return X, y


def xor(n_per=50, seed=0):
    rng = np.random.default_rng(seed)
    centers = [(-3, -3, 0), (3, 3, 0), (-3, 3, 1), (3, -3, 1)]
    X = np.vstack([rng.normal((cx, cy), 0.5, size=(n_per, 2)) for cx, cy, _ in centers])
    y = np.concatenate([[c] * n_per for *_, c in centers])
    return X, y


@pytest.mark.parametrize("kind", KINDS)
def test_separable_blobs_train_accuracy(kind):
    X, y = blobs()
    model = fit(LearnerSpec(kind, seed=1), X, y)
    labels, scores = predict(model, X)
    assert np.mean(labels == y) >= 0.99
    assert np.all((scores >= 0) & (scores <= 1))


def test_xor():
    X, y = xor()
    tree = fit(LearnerSpec("decision_tree", {"min_leaf": 1}), X, y)
    assert tree.depth >= 2
    assert np.mean(predict(tree, X)[0] == y) == 1.0
    lr = fit(LearnerSpec("logistic_regression"), X, y)
    assert abs(np.mean(predict(lr, X)[0] == y) - 0.5) <= 0.1


def test_constant_features_nb_predicts_prior():
    X = np.ones((30, 3))
    y = np.array([1] * 20 + [0] * 10)
    model = fit(LearnerSpec("gaussian_nb"), X, y)
    labels, scores = predict(model, np.ones((4, 3)))
    assert labels.tolist() == [1] * 4
    np.testing.assert_allclose(scores, 2 / 3)


def test_fit_errors():
    X, y = blobs()
    with pytest.raises(SingleClassError):
        fit(LearnerSpec("random_forest"), X, np.zeros_like(y))
    bad = X.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        fit(LearnerSpec("gaussian_nb"), bad, y)
    with pytest.raises(ValueError):
        LearnerSpec("svm")
    with pytest.raises(ValueError):
        LearnerSpec("random_forest", {"depth": 3})


def test_predict_contract():
    X, y = blobs()
    model = fit(LearnerSpec("logistic_regression"), X, y)
    labels, scores = predict(model, np.empty((0, 2)))
    assert labels.shape == (0,) and scores.shape == (0,)
    with pytest.raises(ValueError):
        predict(model, np.zeros((3, 5)))
    lr = LogisticRegression()
    lr.coef_ = np.zeros(3)
    lr.mean_, lr.scale_ = np.zeros(2), np.ones(2)
    assert lr.predict_proba(np.zeros((1, 2)))[0] == 0.5


@pytest.mark.parametrize("seed", range(5))
def test_lr_gradient_finite_difference(seed):
    rng = np.random.default_rng(seed)
    Z = np.column_stack([np.ones(25), rng.normal(size=(25, 4))])
    y = rng.integers(0, 2, 25)
    beta = rng.normal(size=5)
    lam = 0.1
    _, grad = loss_and_grad(beta, Z, y, lam)
    h = 1e-6
    num = np.array([(loss_and_grad(beta + h * e, Z, y, lam)[0] - loss_and_grad(beta - h * e, Z, y, lam)[0]) / (2 * h)
                    for e in np.eye(5)])
    assert np.linalg.norm(num - grad) / np.linalg.norm(grad) <= 1e-5


@pytest.mark.parametrize("seed", range(5))
def test_lr_converges_to_tolerance(seed):
    X, y = blobs(sep=1.0, seed=seed, dim=3)
    model = LogisticRegression().fit(X, y)
    assert model.grad_norm_ <= model.tol


@pytest.mark.parametrize("seed", range(5))
def test_single_tree_forest_equals_tree(seed):
    X, y = blobs(sep=1.5, seed=seed, dim=4)
    rf = fit(LearnerSpec("random_forest", {"n_trees": 1, "bootstrap": False, "max_features": None}, seed), X, y)
    dt = fit(LearnerSpec("decision_tree", seed=seed), X, y)
    Xq = np.random.default_rng(99).normal(size=(300, 4)) * 2
    assert np.array_equal(predict(rf, Xq)[0], predict(dt, Xq)[0])


def test_forest_independent_of_workers():
    X, y = blobs(sep=1.0, dim=5, n=300)
    a = RandomForest(n_trees=8, seed=4, workers=1).fit(X, y)
    b = RandomForest(n_trees=8, seed=4, workers=2).fit(X, y)
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))


def test_forest_score_is_vote_fraction():
    X, y = blobs(sep=0.8, dim=3, n=200)
    rf = RandomForest(n_trees=7, seed=2).fit(X, y)
    votes = np.mean([t.predict(X) for t in rf.trees_], axis=0)
    np.testing.assert_allclose(rf.predict_proba(X), votes)


def test_tree_tie_breaks_lowest_feature():
    # identical columns: the split must use feature 0
    x = np.arange(20, dtype=float)
    X = np.column_stack([x, x])
    y = (x >= 10).astype(int)
    t = DecisionTree(max_depth=1, min_leaf=1).fit(X, y)
    assert t.feature_[0] == 0


@pytest.mark.parametrize("seed", range(6))
def test_adaboost_training_error_bound(seed):
    X, y = blobs(n=300, sep=1.0, seed=seed, dim=3)
    ab = AdaBoostSAMME(n_stages=30, base_depth=1, seed=seed).fit(X, y)
    errs = np.array(ab.errors_)
    assert np.all(errs < 0.5)
    bound = np.cumprod(2 * np.sqrt(errs * (1 - errs)))
    train_err = [np.mean(p != y) for p in ab.staged_predict(X)]
    assert np.all(np.array(train_err) <= bound + 1e-12)


def test_adaboost_stage_weight_formula():
    X, y = blobs(n=200, sep=1.0, dim=2)
    ab = AdaBoostSAMME(n_stages=5, base_depth=1).fit(X, y)
    for err, alpha in zip(ab.errors_, ab.alphas_):
        assert alpha == pytest.approx(np.log((1 - err) / err) + np.log(1))


def test_adaboost_stops_when_weak_learner_fails():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(100, 2))
    y = rng.integers(0, 2, 100)
    ab = AdaBoostSAMME(n_stages=50, base_depth=1).fit(X, y)
    assert len(ab.alphas_) <= 50
    assert np.all(np.array(ab.errors_) < 0.5)


def test_evaluate_examples():
    pred = [1, 1, 1, 1, 0, 0, 0]
    act = [1, 1, 1, 0, 1, 1, 0]
    p, r, f = evaluate(pred, act)
    assert (p, r) == (0.75, 0.6)
    assert f == pytest.approx(2 / 3)
    assert evaluate([1, 0, 1], [1, 0, 1]) == (1.0, 1.0, 1.0)
    assert evaluate([0, 0], [1, 0]) == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        evaluate([1], [1, 0])


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60),
       st.randoms(use_true_random=False))
def test_evaluate_permutation_invariant(rows, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    a = evaluate(*zip(*rows))
    b = evaluate(*zip(*shuffled))
    assert a == b
    if a.precision + a.recall > 0:
        assert a.f1 == pytest.approx(2 * a.precision * a.recall / (a.precision + a.recall))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1)), min_size=1, max_size=60),
       st.lists(st.integers(0, 1), max_size=40))
def test_extra_test_negatives_keep_recall_and_cannot_raise_precision(rows, extra_preds):
    pred, act = map(list, zip(*rows))
    base = evaluate(pred, act)
    more = evaluate(pred + extra_preds, act + [0] * len(extra_preds))
    assert more.recall == base.recall
    assert more.precision <= base.precision


def test_split_arithmetic():
    y = np.repeat([0, 1], 500)
    tr, te = stratified_split(y, 0.7, seed=0)
    assert len(tr) == 700 and len(te) == 300
    assert y[tr].sum() == 350
    folds = stratified_folds(y[tr], 10, seed=0)
    assert np.bincount(folds).tolist() == [70] * 10
    assert all(y[tr][folds == k].sum() == 35 for k in range(10))


def test_split_and_cv_determinism_and_both_cv_summaries():
    X, y = blobs(n=400, sep=1.0, seed=3)
    spec = LearnerSpec("gaussian_nb")
    a = split_and_cv(X, y, spec, seed=5)
    b = split_and_cv(X, y, spec, seed=5)
    assert a.metrics == b.metrics and a.folds == b.folds
    assert a.n_train == 280 and a.n_test == 120 and len(a.folds) == 10
    assert a.cv_mean is not None and a.cv_pooled is not None
    assert a.cv_mean != a.cv_pooled
    with pytest.raises(ValueError):
        split_and_cv(X[:30], np.r_[np.ones(8), np.zeros(22)].astype(int), spec)


def test_model_round_trip(tmp_path):
    X, y = blobs(sep=1.0, dim=3)
    for kind in KINDS:
        spec = LearnerSpec(kind, {"n_trees": 5} if kind == "random_forest" else {}, seed=2)
        model = fit(spec, X, y)
        save_model(tmp_path / f"{kind}.pkl", model, spec)
        back = load_model(tmp_path / f"{kind}.pkl")
        assert np.array_equal(predict(back, X)[1], predict(model, X)[1])
    (tmp_path / "junk.pkl").write_bytes(b"\x80\x04N.")
    with pytest.raises(ValueError):
        load_model(tmp_path / "junk.pkl")


def test_confusion_counts():
    c = confusion([1, 0, 1, 0], [1, 1, 0, 0])
    assert (c.tp, c.fp, c.fn, c.tn) == (1, 1, 1, 1)
