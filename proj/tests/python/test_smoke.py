import math

import pytest

import ccmsel


def path3():
    return ccmsel.Graph.with_nodes(3, [(0, 1), (1, 2)])


def test_graph_and_statistics():
    g = path3()
    assert g.n == 3 and g.edge_count == 2
    assert g.degree_distribution() == [0, 2, 1]
    assert g.degree_mixing() == {(1, 2): 2}
    assert ccmsel.Graph.from_json(g.to_json()) == g


def test_volumes():
    g = path3()
    assert ccmsel.log_volume(g, "edges")["log_count"] == pytest.approx(math.log(3))
    v = ccmsel.log_volume(g, "degmix", seed=1)
    assert v["method"] == "oracle"
    assert v["log_count"] == pytest.approx(math.log(3))


def test_evidence_and_posterior():
    g = ccmsel.Graph.with_nodes(2, [(0, 1)])
    r = ccmsel.evidence(g, "m1")
    assert r["log_evidence"] == pytest.approx(-math.log(2))
    assert r["log_evidence"] == r["log_integral"] - r["log_volume"]
    m3 = ccmsel.evidence(path3(), "m3", priors="[m3]\nmu = 0.5\nsigma = 0.25\n", seed=1)
    assert m3["method"] == "quadrature"
    p = ccmsel.posterior_probabilities([0.0, math.log(3)])
    assert p == pytest.approx([0.25, 0.75])


def test_simulate_is_deterministic():
    a = ccmsel.simulate("er", 50, seed=4, p=0.1)
    b = ccmsel.simulate("er", 50, seed=4, p=0.1)
    assert a == b
    assert ccmsel.simulate("er", 20, seed=1, p=1.0).edge_count == 190


def test_fit_prior():
    states = {s: ccmsel.simulate("er", 60, seed=i, p=0.05 + 0.02 * i) for i, s in enumerate("ABCD")}
    out = ccmsel.fit_prior(states, "A", "m2")
    assert "[m2]" in out["priors"]
    assert "A" not in out["per_state_summaries"]


def test_errors_are_raised():
    with pytest.raises(ccmsel.Error, match="domain_error"):
        ccmsel.evidence(path3(), "m2", priors="[m2]\nalpha = -1\n")
    with pytest.raises(ccmsel.Error, match="typed_attribute_missing"):
        ccmsel.evidence(path3(), "m4")
