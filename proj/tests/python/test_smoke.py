"""End-to-end smoke tests for the python bindings.

Everything here runs on a small synthetic cohort so the whole file finishes in
seconds; the heavy statistical checks live in the C++ unit and acceptance
suites.
"""

import math

import pytest

import p2pscore as ps

SMALL = dict(
    steps=40,
    batch_size=25,
    stage1_learning_rate=0.05,
    stage2_learning_rate=0.02,
    hidden_layers=[8, 4],
    seed=3,
)


@pytest.fixture(scope="module")
def cohort():
    return ps.gen_synthetic(n_loans=300, seed=21)


@pytest.fixture(scope="module")
def split(cohort):
    return ps.split_train_test(cohort, 0.8, seed=7)


@pytest.fixture(scope="module")
def model(split):
    train, _ = split
    return ps.TwoStageModel.train(train, **SMALL)


def test_version():
    assert ps.__version__ == "0.1.0"


def test_synthetic_cohort(cohort):
    assert len(cohort) == 300
    assert len({r.loan_id for r in cohort}) == 300
    for r in cohort:
        assert r.status in ("Default", "NonDefault")
        assert r.funded_amount > 0
        assert r.annual_income > 0
    summary = ps.summarize(cohort)
    assert summary["count"] == 300
    assert 0.0 < summary["default_rate"] < 1.0
    assert "dti" in summary["continuous"]


def test_split_is_partition(cohort, split):
    train, test = split
    assert len(train) == 240 and len(test) == 60
    train_ids = {r.loan_id for r in train}
    test_ids = {r.loan_id for r in test}
    assert not train_ids & test_ids
    assert train_ids | test_ids == {r.loan_id for r in cohort}


def test_score_gate_consistency(split, model):
    train, test = split
    rows = model.score(test)
    assert len(rows) == len(test)
    for row in rows:
        assert 0.0 < row["pd"] < 1.0
        assert row["gate"] in ("passed", "filtered")
        assert (row["gate"] == "passed") == (row["predicted_irr"] is not None)
        assert (row["gate"] == "filtered") == (row["pd"] > model.gamma)
    # Same data, same seed: training is deterministic.
    again = ps.TwoStageModel.train(train, **SMALL)
    assert [r["pd"] for r in again.score(test)] == [r["pd"] for r in rows]
    assert again.stage1_loss == model.stage1_loss


def test_loss_curves(model):
    assert len(model.stage1_loss) == SMALL["steps"]
    assert len(model.stage2_loss) == SMALL["steps"]
    assert all(math.isfinite(x) and x >= 0 for x in model.stage1_loss)


def test_classification_report(split, model):
    _, test = split
    report = model.evaluate_classification(test)
    labeled = sum(1 for r in test if r.status is not None)
    assert report["tp"] + report["fn"] + report["fp"] + report["tn"] == labeled
    for key in ("precision_p", "recall_p", "precision_n", "recall_n"):
        assert 0.0 <= report[key] <= 1.0
    # gamma = 1 passes every loan, so every non-default is predicted positive.
    lax = model.evaluate_classification(test, gamma=1.0)
    assert lax["recall_p"] == 1.0 and lax["recall_n"] == 0.0


def test_regression_mse(split, model):
    _, test = split
    mse = model.evaluate_regression(test)
    assert math.isfinite(mse) and mse >= 0.0


def test_save_load_roundtrip(tmp_path, split, model):
    _, test = split
    model.save(str(tmp_path))
    loaded = ps.TwoStageModel.load(str(tmp_path), gamma=model.gamma)
    original = model.score(test)
    restored = loaded.score(test)
    assert [r["pd"] for r in restored] == [r["pd"] for r in original]
    assert [r["predicted_irr"] for r in restored] == [r["predicted_irr"] for r in original]


def test_compare_approaches(split, model):
    train, test = split
    report = ps.compare_approaches(
        model,
        train,
        test,
        k=10,
        logistic_steps=40,
        logistic_batch_size=25,
        logistic_learning_rate=0.05,
        seed=3,
    )
    names = [a["approach"] for a in report["approaches"]]
    assert names == ["credit_scoring", "profit_scoring", "two_stage"]
    for a in report["approaches"]:
        assert len(a["selection"]) <= report["k"]
        picks = [row["actual_irr"] for row in a["selection"]]
        assert a["avg_actual_irr"] == pytest.approx(sum(picks) / len(picks))
    two_stage = report["approaches"][2]
    assert all(row["gate"] == "passed" for row in two_stage["selection"])


def test_solve_irr():
    # One period of exactly 365 days: 100 -> 110 is a 10% annual rate.
    flows = [("2021-01-01", -100.0), ("2022-01-01", 110.0)]
    solution = ps.solve_irr(flows)
    assert solution["status"] == "converged"
    assert solution["rate"] == pytest.approx(0.10, abs=1e-9)
    # The rate is scale-invariant.
    scaled = ps.solve_irr([(d, a * 1000.0) for d, a in flows])
    assert scaled["rate"] == pytest.approx(solution["rate"], abs=1e-9)
    # Near-total loss is floored rather than solved.
    lost = ps.solve_irr([("2021-01-01", -100.0), ("2021-06-01", 0.25)])
    assert lost["status"] == "total_loss"


def test_csv_roundtrip(tmp_path, cohort):
    loans_path = str(tmp_path / "loans.csv")
    payments_path = str(tmp_path / "payments.csv")
    ps.write_loans_csv(loans_path, cohort)
    ps.write_payments_csv(payments_path, cohort)
    loaded = ps.load_dataset(loans_path, payments_path)
    assert len(loaded) == len(cohort)
    by_id = {r.loan_id: r for r in loaded}
    labeled = 0
    for orig in cohort:
        back = by_id[orig.loan_id]
        assert back.grade == orig.grade
        assert back.dti == pytest.approx(orig.dti, abs=1e-12)
        if orig.irr is not None and back.irr is not None:
            labeled += 1
            assert back.irr == pytest.approx(orig.irr, abs=1e-9)
    assert labeled >= 0.9 * len(cohort)


def test_cli_in_process(tmp_path):
    out_dir = str(tmp_path / "run")
    config = tmp_path / "smoke.conf"
    config.write_text(
        "synth.n_loans = 120\n"
        "stage1.steps = 20\nstage1.batch_size = 20\nstage1.learning_rate = 0.05\n"
        "stage1.hidden_layers = 8,4\n"
        "stage2.steps = 20\nstage2.batch_size = 20\nstage2.learning_rate = 0.02\n"
        "stage2.hidden_layers = 8,4\n"
    )
    assert ps.run_cli(["synth", "--config", str(config), "--out-dir", out_dir]) == 0
    assert (tmp_path / "run" / "loans.csv").exists()
    assert (
        ps.run_cli(
            [
                "train",
                "--config",
                str(config),
                "--loans",
                out_dir + "/loans.csv",
                "--payments",
                out_dir + "/payments.csv",
                "--out-dir",
                out_dir,
            ]
        )
        == 0
    )
    assert (tmp_path / "run" / "stage1_model.json").exists()
    assert ps.run_cli(["train"]) == 1  # no loans file
    with pytest.raises(ValueError):
        ps.TwoStageModel.train([], gamma=2.0)


def test_error_mapping(cohort):
    with pytest.raises(ValueError):
        ps.split_train_test(cohort, 1.5, seed=0)
    with pytest.raises(RuntimeError):
        ps.load_dataset("/nonexistent/loans.csv")
