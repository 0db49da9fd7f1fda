import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from playgol.estimators import MetagolSynthesizer, PlaygolSynthesizer, check_pairs


def test_fit_predict_score():
    est = MetagolSynthesizer(max_clauses=2, deadline=30).fit(["ab", "cd", "xy"], ["A", "C", "X"])
    assert est.outcome_.solved
    assert est.predict(["qz", "mn"]) == ["Q", "M"]
    assert est.score(["qz", "mn"], ["Q", "m"]) == 0.5


def test_unsolved_predicts_none():
    est = MetagolSynthesizer(metarules=("ident",), max_clauses=1, deadline=30).fit(["ab"], ["ba"])
    assert est.program_ is None
    assert est.predict(["ab", "cd"]) == [None, None]
    assert est.score(["ab"], ["ba"]) == 0.0


def test_sklearn_params_and_clone():
    est = PlaygolSynthesizer(max_clauses=3, play_tasks=7, random_state=4)
    params = est.get_params()
    assert params["play_tasks"] == 7 and params["random_state"] == 4 and params["max_clauses"] == 3
    twin = clone(est).set_params(play_tasks=2)
    assert twin.play_tasks == 2 and est.play_tasks == 7
    with pytest.raises(NotFittedError):
        est.predict(["a"])


def test_playgol_synthesizer_grows_bk():
    est = PlaygolSynthesizer(max_clauses=2, deadline=10, max_steps=200_000, play_tasks=10, random_state=1)
    est.fit(["hello", "world"], ["Hel", "Wor"])
    assert est.play_report_.programs_saved >= 1
    assert len(est.bk_.reusable_names()) > len(MetagolSynthesizer().fit(["a"], ["a"]).bk_.reusable_names())


@pytest.mark.parametrize("X,y,exc", [
    ("abc", None, TypeError), ([], None, ValueError), ([1], None, TypeError),
    (["a"], ["b", "c"], ValueError), (["a"], "b", TypeError), (["a"], [2], TypeError),
])
def test_check_pairs_errors(X, y, exc):
    with pytest.raises(exc):
        check_pairs(X, y)
