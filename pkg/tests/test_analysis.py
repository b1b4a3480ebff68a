import random

import numpy as np
import pytest
import scipy.stats

import oracle
from dualemo.analysis import (
    ContingencyTable, DegenerateTableError, DualEmotionCategory, category_grid, chi_square, contingency_table,
    critical_value, dual_emotion_category, heatmap_rows,
)
from dualemo.dataset import Comment, NewsPiece
from dualemo.features import ClassifierAdapter
from dualemo.resources import load_fixture

ADAPTER = ClassifierAdapter.precomputed(["angry", "disgusting", "happy", "none"])


def piece(pid, label, content, comments):
    return NewsPiece(pid, "x", label=label, publisher_emotion_probs=content,
                     comments=[Comment("c", k) for k in range(len(comments))],
                     comment_emotion_probs=comments or None)


def test_soft_voting_worked_example():
    p = piece("a", "fake", [0.3, 0.1, 0, 0.6], [[0.8, 0.1, 0, 0.1], [0.6, 0.3, 0.1, 0]])
    assert dual_emotion_category(p, ADAPTER) == DualEmotionCategory("none", "angry")


def test_single_comment_resonance_and_no_comments():
    p = piece("a", "fake", [0.1, 0.2, 0.7, 0], [[0.1, 0.2, 0.7, 0]])
    cat = dual_emotion_category(p, ADAPTER)
    assert cat.publisher_label == cat.social_label == "happy"
    assert dual_emotion_category(piece("b", "fake", [1, 0, 0, 0], []), ADAPTER).social_label == "none"


def test_argmax_tie_lowest_index():
    p = piece("a", "fake", [0.5, 0.5, 0, 0], [[0, 0, 0.5, 0.5]])
    assert dual_emotion_category(p, ADAPTER) == DualEmotionCategory("angry", "happy")


def test_rescaling_invariance():
    rng = np.random.default_rng(0)
    for _ in range(50):
        content = rng.random(4)
        comments = rng.random((3, 4))
        base = dual_emotion_category(piece("a", "fake", list(content), comments.tolist()), ADAPTER)
        scaled = dual_emotion_category(
            piece("a", "fake", list(content * 7.5), (comments * rng.uniform(0.5, 3, (3, 1))).tolist()), ADAPTER)
        # rescaling comments by different factors changes the mean, so only rescale uniformly
        uniform = dual_emotion_category(piece("a", "fake", list(content * 3), (comments * 3).tolist()), ADAPTER)
        assert base == uniform
        assert base.publisher_label == scaled.publisher_label


def test_lexicon_vote_categories():
    bundle = load_fixture("en")
    adapter = ClassifierAdapter.lexicon_vote(bundle)
    p = NewsPiece("a", "so happy and joyful", comments=[Comment("furious", 1), Comment("angry rage", 2)])
    assert dual_emotion_category(p, adapter, bundle) == DualEmotionCategory("joy", "anger")


FOUR = [
    piece("1", "fake", [0, 0, 1, 0], [[1, 0, 0, 0]]),
    piece("2", "fake", [0, 0, 1, 0], [[1, 0, 0, 0]]),
    piece("3", "real", [0, 0, 1, 0], [[0, 0, 1, 0]]),
    piece("4", "real", [0, 0, 0, 1], [[1, 0, 0, 0]]),
    piece("5", "unverified", [1, 0, 0, 0], [[1, 0, 0, 0]]),
]


def test_contingency_hand_count():
    table = contingency_table(FOUR, ADAPTER)
    assert table.rows == ["fake", "real"]
    assert table.columns == ["happy|angry", "happy|happy", "none|angry"]
    assert table.counts.tolist() == [[2, 0, 0], [0, 1, 1]]
    assert table.total == 4


def test_contingency_single_row_and_whitelist():
    table = contingency_table(FOUR[:2], ADAPTER)
    assert table.rows == ["fake"] and table.counts.tolist() == [[2]]
    table = contingency_table(FOUR, ADAPTER, category_whitelist={"angry", "none"})
    assert table.columns == ["none|angry"]
    with pytest.raises(DegenerateTableError):
        contingency_table(FOUR[4:], ADAPTER)


def test_chi_square_known_values():
    assert chi_square([[5, 5], [5, 5]]).statistic == 0.0
    res = chi_square([[10, 20], [20, 10]])
    assert res.statistic == pytest.approx(20 / 3, abs=1e-9)
    assert res.degrees_of_freedom == 1
    assert res.critical_values[0.95] == pytest.approx(3.841, abs=1e-3)
    assert res.reject_at == {0.95: True, 0.99: True}


def test_chi_square_zero_margins_and_degenerate():
    res = chi_square([[10, 0, 20], [20, 0, 10], [0, 0, 0]])
    assert res.degrees_of_freedom == 1
    assert res.statistic == pytest.approx(20 / 3)
    with pytest.raises(DegenerateTableError):
        chi_square([[1, 2]])
    with pytest.raises(DegenerateTableError):
        chi_square([[1, 0], [2, 0]])


def test_chi_square_matches_oracle_and_invariants():
    rng = random.Random(1)
    for _ in range(100):
        rows, cols = rng.randint(2, 4), rng.randint(2, 6)
        table = [[rng.randint(1, 40) for _ in range(cols)] for _ in range(rows)]
        res = chi_square(table)
        stat, dof = oracle.pearson_chi_square(table)
        assert res.statistic == pytest.approx(stat, rel=1e-12)
        assert res.degrees_of_freedom == dof
        perm = [r[:] for r in table]
        rng.shuffle(perm)
        order = list(range(cols))
        rng.shuffle(order)
        perm = [[r[j] for j in order] for r in perm]
        assert chi_square(perm).statistic == pytest.approx(res.statistic, rel=1e-12)
        k = rng.randint(2, 9)
        assert chi_square([[k * v for v in r] for r in table]).statistic == pytest.approx(k * res.statistic, rel=1e-12)


def test_critical_table_against_reference_quantiles():
    for dof in range(1, 101):
        for q in (0.95, 0.99):
            assert critical_value(dof, q) == pytest.approx(scipy.stats.chi2.ppf(q, dof), abs=6e-5)
    for dof in (101, 150, 400):
        assert critical_value(dof, 0.95) == pytest.approx(scipy.stats.chi2.ppf(0.95, dof), rel=1e-3)
    # values quoted with the reported statistics
    assert critical_value(34, 0.95) == pytest.approx(48.602, abs=1e-3)
    assert critical_value(30, 0.99) == pytest.approx(50.892, abs=1e-3)
    assert critical_value(27, 0.99) == pytest.approx(46.963, abs=1e-3)
    with pytest.raises(ValueError):
        critical_value(0, 0.95)
    with pytest.raises(ValueError):
        critical_value(3, 0.9)


def test_heatmap_rows():
    table = ContingencyTable(["a", "b"], ["x", "y"], [[10, 30], [0, 0]])
    heat = heatmap_rows(table)
    assert heat.percentages.tolist() == [[25.0, 75.0], [0.0, 0.0]]
    assert heat.zero_rows == [False, True]
    assert heat.to_csv() == "publisher,x,y\na,25.0,75.0\nb,0.0,0.0\n"
    rng = np.random.default_rng(2)
    for _ in range(100):
        counts = rng.integers(0, 50, size=(5, 7))
        pct = heatmap_rows(ContingencyTable(list("abcde"), list("pqrstuv"), counts)).percentages
        for row, c in zip(pct, counts):
            if c.sum():
                assert abs(row.sum() - 100.0) < 1e-9


def test_category_grid():
    cats = {p.id: dual_emotion_category(p, ADAPTER) for p in FOUR}
    grid = category_grid(FOUR, cats, ADAPTER.labels, "fake")
    assert grid.counts[2, 0] == 2 and grid.total == 2
    grid = category_grid(FOUR, cats, ADAPTER.labels, "real", ["happy", "none"])
    assert grid.rows == ["happy", "none"] and grid.counts.tolist() == [[1, 0], [0, 0]]
