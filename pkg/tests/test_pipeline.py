"""End-to-end pipeline: config, splits, metrics, bundles, CLI behavior."""

from __future__ import annotations

import json
import random

import pytest

from polydeclare import cart, cli
from polydeclare.declare import (
    TRUE,
    Clause,
    DataPredicate,
    Template,
    TraceIndex,
    evaluate,
    render_clause,
)
from polydeclare.errors import ConfigError, DatasetError, SchemaError
from polydeclare.pipeline import (
    PHASES,
    PipelineConfig,
    bundle_bytes,
    clause_from_obj,
    clause_to_obj,
    compute_metrics,
    load_bundle,
    make_bundle,
    predicate_from_obj,
    predicate_to_obj,
    run_discretize,
    run_eval,
    run_explain,
    run_mine,
    run_train,
    split_segment_ids,
)
from polydeclare.polylog import deserialize, log_from_traces, segment_by_class, serialize

from .conftest import mk_trace
from ._oracles import naive_metrics


def test_config_validation():
    PipelineConfig()  # defaults are valid
    with pytest.raises(ConfigError):
        PipelineConfig(epsilon=0.0)
    with pytest.raises(ConfigError):
        PipelineConfig(theta=1.5)
    with pytest.raises(ConfigError):
        PipelineConfig(max_depth=-1)
    with pytest.raises(ConfigError):
        PipelineConfig(train_fraction=1.0)
    with pytest.raises(ConfigError):
        PipelineConfig(jobs=0)
    with pytest.raises(ConfigError):
        PipelineConfig(format="parquet")


def _segmented_counts(counts):
    """Per-class logs with the requested trace counts and unique ids."""
    out = {}
    for y, n in counts.items():
        traces = [
            mk_trace([[("IncreaseRapidly(dim_1^i)", 1)]], f"c{y}t{i}")
            for i in range(n)
        ]
        out[y] = log_from_traces(traces)
    return out


def test_split_is_stratified_within_one_segment():
    rng = random.Random(3)
    for _ in range(30):
        counts = {y: rng.randint(1, 12) for y in range(rng.randint(1, 4))}
        fraction = rng.choice([0.3, 0.5, 0.7, 0.9])
        segmented = _segmented_counts(counts)
        train, test = split_segment_ids(segmented, fraction, seed=rng.randint(0, 99))
        all_ids = {t.id for log in segmented.values() for t in log.traces}
        assert train | test == all_ids and not (train & test)
        for y, n in counts.items():
            ids = {t.id for t in segmented[y].traces}
            k = len(ids & train)
            assert k >= 1
            if n >= 2:
                assert len(ids & test) >= 1
                assert abs(k - fraction * n) <= 1.0


def test_split_is_deterministic():
    segmented = _segmented_counts({0: 7, 1: 5})
    assert split_segment_ids(segmented, 0.7, 11) == split_segment_ids(segmented, 0.7, 11)
    other = split_segment_ids(segmented, 0.7, 12)
    assert other != split_segment_ids(segmented, 0.7, 11)


def test_metrics_perfect_prediction():
    m = compute_metrics([0, 1, 2], [0, 1, 2])
    assert m["accuracy"] == 1.0
    assert m["precision_macro"] == m["recall_macro"] == m["f1_macro"] == 1.0
    assert m["unseen_classes"] == []


def test_metrics_hand_confusion():
    # confusion [[5, 0], [2, 3]]: class 0 all correct, class 1 leaks twice
    truth = [0] * 5 + [1] * 5
    predicted = [0] * 5 + [0, 0, 1, 1, 1]
    m = compute_metrics(truth, predicted)
    assert m["accuracy"] == pytest.approx(0.8)
    assert m["confusion"]["matrix"] == [[5, 0], [2, 3]]
    assert m["per_class"]["1"]["recall"] == pytest.approx(0.6)
    assert m["per_class"]["1"]["precision"] == pytest.approx(1.0)
    assert m["recall_macro"] == pytest.approx((1.0 + 0.6) / 2)


def test_metrics_match_naive_oracle():
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(1, 40)
        truth = [rng.randint(0, 2) for _ in range(n)]
        predicted = [rng.randint(0, 2) for _ in range(n)]
        m = compute_metrics(truth, predicted)
        o = naive_metrics(truth, predicted)
        for key in ("accuracy", "precision_macro", "recall_macro", "f1_macro"):
            assert m[key] == pytest.approx(o[key])


def test_metrics_flag_classes_the_model_cannot_predict():
    m = compute_metrics([0, 1, 2], [0, 1, 1], class_names=["up", "down", "flat"], model_classes=[0, 1])
    assert m["unseen_classes"] == ["flat"]
    assert m["confusion"]["labels"] == ["up", "down", "flat"]
    with pytest.raises(ValueError):
        compute_metrics([0], [0, 1])


def test_macro_f1_is_mean_of_per_class_harmonics():
    truth = [0, 0, 1, 1, 2, 2]
    predicted = [0, 1, 1, 1, 0, 2]
    m = compute_metrics(truth, predicted)
    per = [m["per_class"][k]["f1"] for k in ("0", "1", "2")]
    assert m["f1_macro"] == pytest.approx(sum(per) / 3)


def _random_clause(rng):
    op = rng.choice(["<=", ">", "=", "!="])
    const = rng.choice([0.5, -1.0]) if op in ("<=", ">") else rng.choice([0.5, "red"])
    pred = DataPredicate((((f"k{rng.randint(0, 2)}", op, const),),))
    if rng.random() < 0.4:
        return Clause(Template.EXISTS, ("a", pred), all_variant=rng.random() < 0.5)
    return Clause(
        Template.RESPONSE,
        ("a", TRUE),
        ("b", pred),
        poly=rng.random() < 0.5,
    )


def test_clause_json_round_trip():
    rng = random.Random(4)
    for _ in range(40):
        clause = _random_clause(rng)
        obj = json.loads(json.dumps(clause_to_obj(clause)))
        assert clause_from_obj(obj, "$.clauses[0]") == clause
    pred = DataPredicate(((("x", ">", 1.0), ("y", "=", "red")), (("z", "<=", 0.0),)))
    assert predicate_from_obj(json.loads(json.dumps(predicate_to_obj(pred))), "$.p") == pred


def test_clause_schema_errors():
    with pytest.raises(SchemaError):
        clause_from_obj([], "$.clauses[0]")
    with pytest.raises(SchemaError):
        clause_from_obj({"template": "NoSuch"}, "$.clauses[0]")
    with pytest.raises(SchemaError):
        clause_from_obj({"template": "Exists", "activation": {"label": 3}}, "$.c")
    with pytest.raises(SchemaError):
        predicate_from_obj([[["x", ">"]]], "$.p")
    with pytest.raises(SchemaError):
        predicate_from_obj({"not": "a list"}, "$.p")


def test_bundle_contains_only_reproducible_inputs():
    config = PipelineConfig(jobs=4, format="json_dir", seed=3)
    tree = cart.fit([({"f": 0.0}, 0), ({"f": 1.0}, 1)], max_depth=2)
    spec_like = type("S", (), {"clauses": (), "tree": tree})
    bundle = make_bundle(config, spec_like)
    assert set(bundle) == {"bundle_version", "config", "clauses", "tree"}
    assert set(bundle["config"]) == {"epsilon", "theta", "max_depth", "train_fraction", "seed"}
    data = bundle_bytes(bundle)
    assert load_bundle(data) == bundle


def test_load_bundle_rejects_bad_payloads():
    with pytest.raises(SchemaError):
        load_bundle(b"not json")
    with pytest.raises(SchemaError):
        load_bundle(b"[1, 2]")
    with pytest.raises(SchemaError):
        load_bundle(b'{"bundle_version": 99}')


def test_train_timings_use_stable_phase_keys(toy_csv):
    bundle, timings = run_train(toy_csv, PipelineConfig())
    assert set(timings) == set(PHASES)
    assert all(v >= 0.0 for v in timings.values())
    assert bundle["bundle_version"] == 1


def test_train_then_eval_separates_toy_dataset(toy_csv):
    config = PipelineConfig(seed=1)
    bundle, _ = run_train(toy_csv, config)
    metrics = run_eval(bundle, toy_csv, "long_csv")
    assert metrics["accuracy"] == 1.0
    assert metrics["n_segments"] >= 2
    assert metrics["unseen_classes"] == []


def test_small_toy_reaches_perfect_training_accuracy(tmp_path):
    rows = ["series_id,t,value,class"]
    for sid in range(4):
        up = sid % 2 == 0
        for t in range(1, 13):
            v = t * 1.0 if up else 12.0 - t
            rows.append(f"s{sid},{t},{v},{0 if up else 1}")
    path = tmp_path / "tiny.csv"
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    bundle, _ = run_train(path, PipelineConfig())
    payload, _ = run_discretize(path, PipelineConfig())
    segmented = segment_by_class(deserialize(payload))
    clauses = [clause_from_obj(o, "$") for o in bundle["clauses"]]
    tree = cart.from_json(bundle["tree"])
    hits = total = 0
    for y, log in segmented.items():
        for trace in log.traces:
            row = {render_clause(c): float(int(evaluate(c, TraceIndex(trace)))) for c in clauses}
            hits += int(cart.predict(tree, row) == y)
            total += 1
    assert total == 4 and hits == total


def test_discretize_then_mine_equals_train_bit_exactly(toy_csv):
    config = PipelineConfig(seed=5)
    direct, _ = run_train(toy_csv, config)
    payload, _ = run_discretize(toy_csv, config)
    chained, _ = run_mine(payload, config)
    assert bundle_bytes(direct) == bundle_bytes(chained)


def test_training_is_deterministic_and_job_count_invariant(toy_csv):
    config = PipelineConfig(seed=2)
    reference = bundle_bytes(run_train(toy_csv, config)[0])
    assert bundle_bytes(run_train(toy_csv, config)[0]) == reference
    threaded = PipelineConfig(seed=2, jobs=3)
    assert bundle_bytes(run_train(toy_csv, threaded)[0]) == reference


def test_empty_dataset_fails_before_mining(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("series_id,t,value,class\n", encoding="utf-8")
    with pytest.raises(DatasetError):
        run_train(path, PipelineConfig())


def _diverse_log():
    """Two-class log where no label (roots included) spans a full class log."""
    up1, down1 = "IncreaseRapidly(dim_1^i)", "DecreaseRapidly(dim_1^i)"
    up2, down2 = "IncreaseRapidly(dim_2^i)", "DecreaseRapidly(dim_2^i)"
    traces = []
    for y in (0, 1):
        for i in range(2):
            traces.append(mk_trace([[(up1, 1)], [(down1, 1)]], f"c{y}d1{i}", class_label=y))
            traces.append(mk_trace([[(up2, 1)], [(down2, 1)]], f"c{y}d2{i}", class_label=y))
    return log_from_traces(traces)


def test_theta_one_on_diverse_logs_warns_about_empty_clause_set():
    payload = serialize(_diverse_log())
    with pytest.warns(RuntimeWarning, match="empty clause set"):
        bundle, _ = run_mine(payload, PipelineConfig(theta=1.0))
    assert bundle["clauses"] == []
    assert isinstance(cart.from_json(bundle["tree"]).root, cart.Leaf)
    text = run_explain(bundle)
    assert "always predicts class" in text and "no clause separated" in text


def test_explain_wording_follows_cell_semantics():
    tree = cart.TrainedTree(
        cart.Split(
            "Response(a, b)",
            -0.5,
            None,
            cart.Leaf(0, ((0, 2),)),
            cart.Split(
                "Exists(c)",
                0.5,
                None,
                cart.Leaf(1, ((1, 1),)),
                cart.Leaf(2, ((2, 1),)),
            ),
        ),
        2,
        (0, 1, 2, 3),
        4,
    )
    bundle = {"bundle_version": 1, "clauses": [], "tree": cart.to_json(tree)}
    text = run_explain(bundle)
    assert text.splitlines() == [
        "class 0:",
        "  - Response(a, b) = violated",
        "class 1:",
        "  - Response(a, b) = not violated ∧ Exists(c) = not satisfied",
        "class 2:",
        "  - Response(a, b) = not violated ∧ Exists(c) = satisfied",
        "class 3:",
        "  (never predicted)",
    ]


def test_explain_replay_reproduces_tree_predictions(toy_csv):
    config = PipelineConfig(seed=1)
    bundle, _ = run_train(toy_csv, config)
    clauses = [clause_from_obj(o, "$") for o in bundle["clauses"]]
    tree = cart.from_json(bundle["tree"])
    formulas = {y: cart.class_formula(tree, y) for y in tree.classes}
    payload, _ = run_discretize(toy_csv, config)
    segmented = segment_by_class(deserialize(payload))
    checked = 0
    for log in segmented.values():
        for trace in log.traces:
            row = {render_clause(c): float(int(evaluate(c, TraceIndex(trace)))) for c in clauses}
            matching = [y for y, f in formulas.items() if f.holds(row)]
            assert matching == [cart.predict(tree, row)]
            checked += 1
    assert checked >= 6


# --- CLI ---------------------------------------------------------------------


def test_cli_train_eval_explain_round_trip(toy_csv, tmp_path, capsys):
    model = tmp_path / "model.json"
    assert cli.main(["train", str(toy_csv), "--out", str(model), "--seed", "1"]) == 0
    capsys.readouterr()
    assert cli.main(["eval", str(model), str(toy_csv)]) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["accuracy"] == 1.0
    assert cli.main(["explain", str(model)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("class ") or "always predicts" in out


def test_cli_chaining_matches_train_output(toy_csv, tmp_path):
    log_path = tmp_path / "log.json"
    chained = tmp_path / "chained.json"
    direct = tmp_path / "direct.json"
    assert cli.main(["discretize", str(toy_csv), "--out", str(log_path)]) == 0
    assert cli.main(["mine", str(log_path), "--out", str(chained)]) == 0
    assert cli.main(["train", str(toy_csv), "--out", str(direct)]) == 0
    assert chained.read_bytes() == direct.read_bytes()


def test_cli_validation_failures_exit_2(toy_csv, tmp_path, capsys):
    assert cli.main(["train", str(toy_csv), "--epsilon", "-1"]) == 2
    assert "error:" in capsys.readouterr().err
    assert cli.main(["train", str(tmp_path / "missing.csv")]) == 2
    assert cli.main(["eval", str(tmp_path / "missing.json"), str(toy_csv)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}", encoding="utf-8")
    assert cli.main(["explain", str(bad)]) == 2


def test_cli_emits_timings_on_stderr(toy_csv, tmp_path, capsys):
    model = tmp_path / "model.json"
    assert cli.main(["train", str(toy_csv), "--out", str(model)]) == 0
    err = capsys.readouterr().err
    payload = json.loads(err.splitlines()[-1])
    assert set(payload["timings"]) == set(PHASES)


def test_eval_reuses_bundle_config_for_the_split(toy_csv):
    # two different seeds hold out different segments, so eval must follow
    # the bundle's stored seed rather than any ambient default
    for seed in (1, 3):
        bundle, _ = run_train(toy_csv, PipelineConfig(seed=seed))
        metrics = run_eval(bundle, toy_csv, "long_csv")
        assert metrics["n_segments"] == 2
        assert metrics["accuracy"] == 1.0
