import numpy as np
import pytest

import ssm_graphon as sg


def path4():
    a = np.zeros((4, 4), dtype=np.uint8)
    for i in range(3):
        a[i, i + 1] = a[i + 1, i] = 1
    return sg.Graph(a)


def test_graph_basics():
    g = path4()
    assert g.n == 4
    assert g.edge_count == 3
    assert g.density() == pytest.approx(0.5)
    assert sg.degree_sequence(g) == [1, 2, 2, 1]


def test_bad_adjacency_raises():
    a = np.zeros((3, 3), dtype=np.uint8)
    a[0, 1] = 1
    with pytest.raises(sg.InvariantError):
        sg.Graph(a)


def test_edge_list_round_trip(tmp_path):
    g = sg.Graph.from_edges(5, [(0, 1), (1, 4)])
    path = tmp_path / "g.edges"
    sg.write_edge_list(g, path)
    back = sg.load_edge_list(path)
    assert back.n == 5
    assert np.array_equal(back.adjacency(), g.adjacency())


def test_path_graph_histogram_loglik():
    fit = sg.fit_histogram(path4(), 2, seed=3)
    assert fit["loglik"] == pytest.approx(4 * (0.25 * np.log(0.25) + 0.75 * np.log(0.75)), abs=1e-12)
    assert fit["loglik"] >= fit["initial_loglik"]


def test_default_bandwidth():
    assert sg.default_bandwidth(100) == 5
    assert sg.default_bandwidth(400) == 10


def test_simulate_and_fit():
    g, theta, xi = sg.simulate("f2", 150, seed=7)
    assert g.n == 150
    assert theta.shape == (150, 150)
    assert np.allclose(theta, theta.T)
    assert len(xi) == 150
    fit = sg.fit_ssm(g, seed=7)
    assert 1 <= fit["s"] <= fit["k"] * (fit["k"] + 1) // 2
    assert len(fit["curve"]) == fit["k"] * (fit["k"] + 1) // 2
    assert fit["theta"].shape == (150, 150)
    assert sg.mse(fit["theta"], theta) < 0.05


def test_estimators_share_shape():
    g, theta, _ = sg.simulate("f0", 80, seed=1)
    for method in sg.method_names():
        est = sg.estimate(g, method, seed=1)
        assert est["theta"].shape == (80, 80)
        assert est["theta"].min() >= 0.0 and est["theta"].max() <= 1.0


def test_auc_values():
    assert sg.auc([0.9, 0.1, 0.8, 0.3], [1, 0, 0, 1]) == pytest.approx(0.75)
    with pytest.raises(sg.UndefinedMetricError):
        sg.auc([0.1, 0.2], [1, 1])


def test_graphon_lookup():
    f = sg.graphon_by_name("f0")
    assert f(0.2, 0.7) == pytest.approx(0.5)
    with pytest.raises(Exception):
        sg.graphon_by_name("nope")
