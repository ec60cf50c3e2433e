import math

import pytest

import ergolab


def test_version_and_schema():
    assert ergolab.SCHEMA_VERSION == "1"
    assert ergolab.__version__.count(".") == 2


def test_language_counts():
    counts = [ergolab.count_language(ergolab.paper("1/4"), n)["count"] for n in range(1, 7)]
    assert counts == [3, 7, 13, 25, 51, 103]
    listed = ergolab.count_language({"type": "sgap", "min_run": 2}, 4, list_words=True)
    assert listed["count"] == 6
    assert listed["words"] == sorted(listed["words"])


def test_entropy_table():
    rows = ergolab.entropy_table(ergolab.paper("1/4"), 8)
    assert rows[-1]["count"] == 393
    assert rows[-1]["ratio"] == pytest.approx(393 / 201)


def test_legality_and_gaps():
    spec = ergolab.paper("1/4")
    assert ergolab.is_legal(spec, "p00p")
    assert not ergolab.is_legal(spec, "pm")
    for n in range(1, 12):
        assert ergolab.minimal_gap(ergolab.paper("1"), "p", "m" * n) == n + 2
    assert ergolab.minimal_gap(spec, "p", "m", v_max=1) is None


def test_transitivity_report():
    report = ergolab.verify_m_transitivity(ergolab.paper("1/4"), 5, 5)
    assert report["failures"] == []
    assert [r["max_gap"] for r in report["per_length"]] == [2, 2, 2, 3, 3]


def test_app_falsifier():
    assert ergolab.app_falsifier(ergolab.paper("1"), 4, 12, 0) == ("ppp0", "00000", "pppp")
    assert ergolab.app_falsifier(ergolab.paper("1/4"), 20, 1, 1) is None


def test_birkhoff_and_rho():
    assert ergolab.birkhoff_average("coordinate", "p00" * 10, 30) == pytest.approx(1 / 3)
    table = {"window": 1, "entries": [{"word": "p", "value": "1/2"}]}
    assert ergolab.birkhoff_average(table, "p0p0", 4) == pytest.approx(0.25)
    assert ergolab.rho_periodic("p", "p") == 0.0
    assert ergolab.rho_periodic("p", "m") > 0.6


def test_splice_round_trip():
    spec = ergolab.paper("1/4")
    program = ergolab.plan_oscillation(spec, -0.75, 0.75)
    assert program["checkpoints"] == [1, 64, 2012, 62400]
    averages = ergolab.splice_averages(spec, program)
    assert averages[0] == 1.0
    assert averages[1] <= -0.7 and averages[2] >= 0.7 and averages[3] <= -0.7


def test_lyapunov():
    cocycle = {"dim": 2, "window": 1, "entries": [{"word": "p", "matrix": [2, 0, 0, 0.5]}]}
    assert ergolab.lyapunov_estimate(cocycle, "p" * 50, 50) == pytest.approx(math.log(2))
    assert ergolab.lyapunov_estimate(cocycle, "0" * 50, 50, norm="frobenius") == pytest.approx(
        math.log(math.sqrt(2)) / 50
    )


def test_bowen_eye():
    a, b = ergolab.bowen_weights(2.0, 2.0, 1.0, 5, 3.0)
    assert a == pytest.approx(1 / 3) and a + b == pytest.approx(1.0)
    assert ergolab.bowen_coverage(2.0, 2.0)["all_pass"]


def test_errors_carry_kind():
    with pytest.raises(ergolab.ErgolabError, match="invalid-params"):
        ergolab.bowen_weights(1.0, 1.0, 1.0, 3, 1.0)
    with pytest.raises(ergolab.ErgolabError, match="validation"):
        ergolab.count_language({"type": "paper", "kappa": 0.25}, 3)
    with pytest.raises(ValueError):
        ergolab.is_legal(ergolab.paper(), "p?")


def test_acceptance_subset():
    report = ergolab.run_acceptance(only=[1, 2])
    assert report["all_pass"]
    assert [c["id"] for c in report["criteria"]] == [1, 2]
