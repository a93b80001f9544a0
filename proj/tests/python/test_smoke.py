"""Smoke tests for the python module."""

import math

import pytest

import lipest


def make_abs_net():
    # relu(x) + relu(-x) = |x|
    return lipest.mlp_from_layers(
        [
            ([[1.0], [-1.0]], [0.0, 0.0], True),
            ([[1.0, 1.0]], [0.0], False),
        ]
    )


def test_forward_and_jacobian():
    net = make_abs_net()
    assert net.input_dim == 1
    assert net.output_dim == 1
    assert lipest.forward(net, [5.0]) == [5.0]
    assert lipest.forward(net, [-5.0]) == [5.0]
    assert lipest.clarke_jacobian(net, [2.0]) == [[1.0]]
    assert lipest.clarke_jacobian(net, [-2.0]) == [[-1.0]]
    assert lipest.clarke_jacobian(net, [0.0]) == [[0.0]]
    assert lipest.activation_pattern(net, [5.0]) == [True, False]


def test_norms():
    assert lipest.vector_norm([3.0, -4.0], "2") == pytest.approx(5.0)
    assert lipest.vector_norm([3.0, -4.0], "1") == pytest.approx(7.0)
    assert lipest.dual_norm_tag("1") == "inf"
    assert lipest.induced_norm([[1.0, -2.0], [3.0, 4.0]], "1", "inf") == 4.0
    assert lipest.induced_norm([[3.0, 0.0], [0.0, 5.0]], "2", "2") == pytest.approx(
        5.0
    )
    with pytest.raises(ValueError):
        lipest.induced_norm([[1.0]], "inf", "1")


def test_boxes():
    box = lipest.Box([0.0, 0.0], [1.0, 2.0])
    assert box.volume() == pytest.approx(2.0)
    cells = lipest.init_subregions(box, 2)
    assert len(cells) == 4
    assert sum(c.volume() for c in cells) == pytest.approx(2.0)
    left, right = lipest.subdivide(box)
    assert left.high[1] == pytest.approx(1.0)
    assert right.low[1] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lipest.Box([1.0], [0.0])


def test_estimate_and_oracles():
    net = lipest.random_mlp([1, 8, 8, 1], seed=3)
    domain = lipest.Box([-1.0], [1.0])
    exact, _ = lipest.breakpoint_oracle_1d(net, domain)

    for algorithm in ("uniform", "partitioned", "ucb"):
        report = lipest.estimate(
            net, domain, algorithm=algorithm, samples=2000, seed=5
        )
        assert report["samples_used"] == 2000
        assert report["estimate"] <= exact + 1e-12
        assert report["estimate"] >= 0.9 * exact

    rerun = lipest.estimate(net, domain, algorithm="ucb", samples=2000, seed=5)
    first = lipest.estimate(net, domain, algorithm="ucb", samples=2000, seed=5)
    assert rerun["estimate"] == first["estimate"]
    assert rerun["argmax"] == first["argmax"]

    grid, _ = lipest.grid_oracle(net, domain, 100001)
    assert grid <= exact + 1e-12
    assert grid >= exact - 1e-6 * max(1.0, exact)

    bps = lipest.enumerate_breakpoints(net, domain)
    assert all(-1.0 < b < 1.0 for b in bps)
    assert bps == sorted(bps)


def test_train_reduces_loss():
    domain = lipest.Box([-1.0, -1.0], [1.0, 1.0])
    inputs, targets = lipest.gen_spheres(2, 3, 200, domain, seed=4)
    assert len(inputs) == 200
    net = lipest.random_mlp([2, 8, 8, 1], seed=4)
    trained, history = lipest.train_mlp(net, inputs, targets, epochs=100, seed=4)
    assert len(history) == 100
    assert history[-1] < history[0]
    assert all(math.isfinite(h) for h in history)
    assert trained.input_dim == 2


def test_model_files_round_trip(tmp_path):
    net = lipest.random_mlp([2, 4, 1], seed=8)
    path = str(tmp_path / "model.json")
    lipest.save_model(net, path)
    loaded = lipest.load_model(path)
    x = [0.3, -0.4]
    assert lipest.forward(loaded, x) == lipest.forward(net, x)
    with pytest.raises(OSError):
        lipest.load_model(str(tmp_path / "missing.json"))
