import json
from fractions import Fraction

import pytest

from schedrand.taskmodel import (
    INF, InvalidTaskset, Job, Task, Taskset, hyperperiod, idle_job, utilization, validate,
)


@pytest.mark.parametrize("periods, expected", [((10, 20, 5), 20), ((7,), 7), ((5, 8, 9, 20), 360)])
def test_hyperperiod(periods, expected):
    assert hyperperiod(Task(1, p, p) for p in periods) == expected


def test_hyperperiod_overflow_and_empty():
    primes = [2**31 - 1, 2**31 - 19, 2**30 - 35]
    with pytest.raises(OverflowError):
        hyperperiod(Task(1, p, p) for p in primes)
    with pytest.raises(ValueError):
        hyperperiod([])


def test_utilization_exact(ex2, ex3):
    assert ex2.utilization == Fraction(3, 5)
    assert 0.997 <= float(ex3.utilization) < 1
    assert utilization([]) == 0


def test_ids_follow_declaration_order(ex1):
    assert [t.id for t in ex1] == [1, 2, 3, 4]
    assert ex1[2] == Task(1, 5, 5, id=3)


def test_validate(ex1):
    assert validate(ex1) == []
    bad_deadline = Taskset.from_params([(1, 10, 12)])
    assert any("constrained deadline" in p for p in validate(bad_deadline))
    overloaded = Taskset.from_params([(6, 10), (6, 10)])
    assert any("EDF utilization bound" in p for p in validate(overloaded))
    assert validate(Taskset()) == ["taskset is empty"]
    assert any("exceeds deadline" in p for p in validate(Taskset.from_params([(5, 10, 4)])))


def test_validate_wcib_bound():
    ts = Taskset.from_params([(3, 10)]).with_wcib([8])
    assert any("wcib" in p for p in validate(ts))
    assert validate(Taskset.from_params([(3, 10)]).with_wcib([7])) == []


def test_invalid_taskset_carries_problems():
    err = InvalidTaskset(["a", "b"])
    assert err.problems == ["a", "b"] and "a; b" in str(err)


def test_json_round_trip(tmp_path, ex3):
    path = tmp_path / "ts.json"
    ex3.to_json(path)
    assert Taskset.from_json(path) == ex3
    assert json.loads(path.read_text())["tasks"][1] == {"wcet": 3, "period": 8, "deadline": 8}


def test_json_deadline_defaults_to_period():
    ts = Taskset.from_dict({"tasks": [{"wcet": 1, "period": 4}]})
    assert ts[0].deadline == 4


@pytest.mark.parametrize("data", [{}, {"tasks": [{"wcet": 1}]}, []])
def test_json_malformed(data):
    with pytest.raises(ValueError):
        Taskset.from_dict(data)


def test_idle_job():
    j = idle_job()
    assert j.is_idle and j.deadline == INF and j.rib == INF
    assert not Job(1, 0, 10, 2, 2, 2, 0).is_idle
