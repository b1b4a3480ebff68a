import numpy as np
import pytest

from dualemo.classifier import (
    MlpModel, ModelFormatError, TrainConfig, TrainingError, build_mlp, class_weight_vector, gradient_check,
    load_model, predict, predict_proba, save_model, train,
)


def test_default_architecture():
    model = build_mlp(260, classes=["fake", "real"])
    assert model.layer_dims == [260, 256, 128, 64, 32, 2]
    assert len(model.weights) == 5
    assert model.weights[0].shape == (256, 260)
    assert not any(b.any() for b in model.biases)
    assert build_mlp(10, classes=3).layer_dims[-1] == 3
    with pytest.raises(ValueError):
        build_mlp(10, hidden_dims=[])


def test_seeded_init():
    a, b = build_mlp(8, [4], 2, seed=3), build_mlp(8, [4], 2, seed=3)
    assert all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))
    limit = np.sqrt(6 / 8)
    assert np.abs(a.weights[0]).max() <= limit


def test_softmax_outputs():
    rng = np.random.default_rng(0)
    model = build_mlp(6, [5, 4], 3, seed=1)
    probs = predict_proba(model, rng.normal(size=(100, 6)))
    assert np.all(probs > 0) and np.all(probs < 1)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    # very large logits saturate in float64, but stay a distribution
    probs = predict_proba(model, rng.normal(size=(100, 6)) * 1e3)
    assert np.all(probs >= 0) and np.all(probs <= 1)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    with pytest.raises(ValueError):
        predict(model, [1.0, 2.0])


def test_zero_weights_uniform():
    model = build_mlp(4, [3], 3)
    for w in model.weights:
        w[:] = 0
    assert predict(model, [1, 2, 3, 4]).tolist() == pytest.approx([1 / 3] * 3, abs=1e-15)


def test_hand_computed_forward():
    model = build_mlp(2, [2], 2)
    model.weights[0][:] = [[1.0, -1.0], [0.5, 2.0]]
    model.biases[0][:] = [0.0, -1.0]
    model.weights[1][:] = [[1.0, 0.0], [0.0, 1.0]]
    model.biases[1][:] = [0.5, 0.0]
    x = [2.0, 1.0]
    h = [max(2 - 1, 0), max(1 + 2 - 1, 0)]  # [1, 2]
    z = [h[0] + 0.5, h[1]]
    e = np.exp(z)
    assert predict(model, x) == pytest.approx(e / e.sum(), abs=1e-15)


def test_embedding_concatenation_contract():
    with_emb = build_mlp(3, [4], 2, seed=5, embedding_dim=2)
    with_emb.weights[0][:, :2] = 0.0
    plain = build_mlp(3, [4], 2, seed=5)
    plain.weights[0][:] = with_emb.weights[0][:, 2:]
    plain.weights[1][:] = with_emb.weights[1]
    x = [0.3, -1.2, 2.0]
    assert np.array_equal(predict(with_emb, x, [0.0, 0.0]), predict(plain, x))
    with pytest.raises(ValueError):
        predict(with_emb, x)
    with pytest.raises(ValueError):
        predict(plain, x, [0.0, 0.0])


def separable(n=200, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1, 1, size=(n, 2))
    y = (x[:, 0] + x[:, 1] > 0).astype(int)
    keep = np.abs(x[:, 0] + x[:, 1]) > 0.1
    return x[keep], y[keep]


def test_separable_toy_reaches_full_accuracy():
    x, y = separable()
    model, history = train(build_mlp(2, [16, 8], 2, seed=0), (x, y), None,
                           TrainConfig(epochs=200, learning_rate=0.1, batch_size=16))
    assert (predict_proba(model, x).argmax(axis=1) == y).mean() == 1.0
    assert len(history.loss) == 200


def test_training_deterministic():
    x, y = separable()
    cfg = TrainConfig(epochs=20, batch_size=8)
    a, ha = train(build_mlp(2, [8], 2, seed=1), (x, y), (x, y), cfg)
    b, hb = train(build_mlp(2, [8], 2, seed=1), (x, y), (x, y), cfg)
    assert all(np.array_equal(u, v) for u, v in zip(a.parameters(), b.parameters()))
    assert ha.to_dict() == hb.to_dict()


def test_early_stopping_restores_best():
    x, y = separable()
    model, history = train(build_mlp(2, [8], 2, seed=1), (x, y), (x, y),
                           TrainConfig(epochs=500, learning_rate=0.1, patience=3))
    assert history.stopped_epoch < 499
    assert history.stopped_epoch - history.best_epoch == 3
    best = max(history.val_macro_f1)
    assert history.val_macro_f1[history.best_epoch] == best


def test_inverse_class_weights_raise_minority_recall():
    rng = np.random.default_rng(4)
    n_major, n_minor = 450, 50
    x = np.vstack([rng.normal(0.0, 1.0, size=(n_major, 2)), rng.normal(1.0, 1.0, size=(n_minor, 2))])
    y = np.array([0] * n_major + [1] * n_minor)
    cfg = dict(epochs=30, learning_rate=0.05, batch_size=32, seed=0)
    recalls = {}
    for mode in ("none", "inverse"):
        model, _ = train(build_mlp(2, [8], 2, seed=0), (x, y), None, TrainConfig(class_weights=mode, **cfg))
        pred = predict_proba(model, x).argmax(axis=1)
        recalls[mode] = (pred[y == 1] == 1).mean()
    assert recalls["inverse"] > recalls["none"]


def test_class_weight_vector():
    w = class_weight_vector(np.array([0, 0, 0, 1]), 2, "inverse")
    assert w.mean() == pytest.approx(1.0)
    assert w[1] == pytest.approx(3 * w[0])
    assert class_weight_vector(np.array([0, 1]), 2, "none").tolist() == [1.0, 1.0]


def test_nan_loss_aborts():
    x = np.array([[np.nan, 1.0], [0.0, 1.0]])
    with pytest.raises(TrainingError, match="epoch"):
        train(build_mlp(2, [4], 2), (x, np.array([0, 1])), None, TrainConfig(epochs=2, standardize=False))


def test_gradient_check_small_models():
    rng = np.random.default_rng(0)
    model = build_mlp(3, [4], 2, seed=2)
    assert gradient_check(model, (rng.normal(size=3), 1), 1e-5) < 1e-4
    # zero input leaves only the biases driving the net; keep them off the relu kink
    model.biases[0][:] = rng.uniform(0.1, 0.5, size=4) * rng.choice([-1, 1], size=4)
    assert gradient_check(model, (np.zeros(3), 0), 1e-5) < 1e-4
    with pytest.raises(ValueError):
        gradient_check(model, (np.zeros(3), 0), 0.0)


def test_gradient_check_smooth_region():
    model = build_mlp(3, [4], 2, seed=2)
    model.weights[0][:] = np.abs(model.weights[0]) + 0.1
    model.biases[0][:] = 0.5
    assert gradient_check(model, (np.array([0.5, 1.0, 0.2]), 0), 1e-5) < 1e-6


def test_gradient_check_with_embedding():
    model = build_mlp(3, [5, 4], 3, seed=8, embedding_dim=2)
    assert gradient_check(model, (np.array([0.2, -0.4, 1.0]), 2, np.array([0.3, 0.7]))) < 1e-4


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(1)
    x, y = separable()
    model, _ = train(build_mlp(2, [8], ["fake", "real"], seed=1), (x, y), None, TrainConfig(epochs=3))
    save_model(model, tmp_path / "m.json")
    loaded = load_model(tmp_path / "m.json")
    probe = rng.normal(size=(100, 2))
    assert np.array_equal(predict_proba(model, probe), predict_proba(loaded, probe))
    assert loaded.classes == ["fake", "real"]

    emb = build_mlp(3, [4], 2, embedding_dim=5)
    save_model(emb, tmp_path / "e.json")
    assert load_model(tmp_path / "e.json").feature_spec == emb.feature_spec


def test_corrupt_and_wrong_version(tmp_path):
    save_model(build_mlp(2, [3], 2), tmp_path / "m.json")
    text = (tmp_path / "m.json").read_text()
    (tmp_path / "t.json").write_text(text[: len(text) // 2])
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "t.json")
    (tmp_path / "v.json").write_text(text.replace('"version": 1', '"version": 99'))
    with pytest.raises(ModelFormatError, match="version"):
        load_model(tmp_path / "v.json")


def test_model_shape_validation():
    model = build_mlp(2, [3], 2)
    with pytest.raises(ValueError):
        MlpModel([2, 3, 2], [model.weights[0].T, model.weights[1]], model.biases, model.feature_spec, model.classes)
