from pathlib import Path

import pytest

import gridtree

WEATHER = Path(__file__).resolve().parents[2] / "data" / "weather.csv"


@pytest.fixture(scope="module")
def weather():
    return gridtree.load_relation(str(WEATHER), "day", "play")


def test_load(weather):
    assert len(weather) == 14
    assert weather.class_attr == "play"
    assert "outlook" in weather.schema


def test_centralized_tree(weather):
    tree = gridtree.id3(weather)
    assert tree.to_dict()["attribute"] == "outlook"
    assert gridtree.verify(weather, tree)["exact"]


@pytest.mark.parametrize("strategy,v,h", [("horizontal", 1, 3), ("grid-hmerge", 2, 2), ("grid-vmerge", 2, 2)])
def test_protocols_match_centralized(weather, strategy, v, h):
    grid = gridtree.partition(weather, v, h, seed=3)
    result = gridtree.run(strategy, grid, seed=3)
    assert result.plaintext(test_mode=True) == gridtree.id3(grid.reassemble())
    assert result.counters["messages"] > 0
    assert gridtree.audit(result, grid) == []


def test_plaintext_needs_test_mode(weather):
    result = gridtree.run("grid-hmerge", gridtree.partition(weather, 2, 2))
    with pytest.raises(gridtree.Error, match="Forbidden"):
        result.plaintext()


def test_distributed_classification(weather):
    grid = gridtree.partition(weather, 2, 2)
    result = gridtree.run("grid-vmerge", grid)
    tree = result.plaintext(test_mode=True)
    for row in weather.tuples:
        label, hops = result.classify(1, gridtree.split_tuple(grid, row))
        assert label == gridtree.classify(tree, dict(zip(weather.schema, row)))
        assert hops >= 0


def test_errors(weather):
    with pytest.raises(gridtree.Error, match="PartitionError"):
        gridtree.partition(weather, 10, 2)
    with pytest.raises(gridtree.Error, match="TooFewParties"):
        gridtree.run("horizontal", gridtree.partition(weather, 1, 2))
    with pytest.raises(gridtree.Error, match="ConfigError"):
        gridtree.run("diagonal", gridtree.partition(weather, 2, 2))
    with pytest.raises(gridtree.Error, match="DuplicateKey"):
        gridtree.parse_relation("id,a,c\n1,x,yes\n1,y,no\n", "id", "c")


def test_cost_prediction():
    p = {"h": 3, "v": 3, "T": 100, "R": 6, "d": 2, "m": 3, "t": 128, "n": 10}
    assert gridtree.predict("grid-hmerge", p)["communication"] == pytest.approx(3456000.0)
    q = dict(p, h=6)
    ratio = gridtree.predict("grid-hmerge", q)["computation"] / gridtree.predict("grid-hmerge", p)["computation"]
    assert ratio == pytest.approx(4.0)


def test_small_sweep():
    rel = gridtree.synthetic_relation(attributes=5, tuples=24, seed=2)
    rep = gridtree.sweep(rel, h_values=[2, 3, 4, 5], v_values=[2, 3, 4, 5], seed=1)
    swept = {g["strategy"]: g["swept"] for g in rep["groups"]}
    assert swept == {"grid-hmerge": "h", "grid-vmerge": "v"}
