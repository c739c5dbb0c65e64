import json

import pytest

from torus_bie import ConfigurationError
from torus_bie import config as cfgmod
from torus_bie.problems import Constant, GreenSum, Samples, SingleLayer


def minimal(**extra):
    cfg = {
        "torus": {"tau": [0, 1]},
        "holes": [{"kind": "circle", "center": [0.5, 0.5], "r": 0.2}],
        "problem": "dirichlet",
        "boundary_data": {"terms": [{"type": "constant", "value": 1}]},
    }
    cfg.update(extra)
    return cfg


@pytest.mark.parametrize("name", cfgmod.bundled_names())
def test_bundled_configs_validate(name):
    cfg, _ = cfgmod.load_config(name)
    torus = cfgmod.build_torus(cfg)
    assert cfgmod.build_holes(cfg, torus)


def test_bundled_names():
    names = cfgmod.bundled_names()
    assert "example1_square" in names and "example6_scaled" in names
    assert cfgmod.load_config("example1_square.json")[0]["name"] == "example1_square"


@pytest.mark.parametrize(
    "mutate,where",
    [
        (lambda c: c.pop("torus"), "$"),
        (lambda c: c.update(problem="heat"), "$.problem"),
        (lambda c: c["holes"][0].pop("r"), "$.holes[0]"),
        (lambda c: c["holes"][0].update(kind="square"), "$.holes[0].kind"),
        (lambda c: c.update(nodes_per_hole=2), "$.nodes_per_hole"),
        (lambda c: c.update(extra=1), "$"),
        (lambda c: c.pop("boundary_data"), "$"),
    ],
)
def test_validation_paths(mutate, where):
    cfg = minimal()
    mutate(cfg)
    with pytest.raises(ConfigurationError) as info:
        cfgmod.validate(cfg)
    assert str(info.value).startswith(f"config error at {where}")


def test_holes_xor_random():
    cfg = minimal(random_holes={"count": 2, "seed": 1})
    with pytest.raises(ConfigurationError):
        cfgmod.validate(cfg)


def test_missing_and_malformed(tmp_path):
    with pytest.raises(ConfigurationError, match="no such file"):
        cfgmod.load_config(str(tmp_path / "nope.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ConfigurationError, match="invalid JSON"):
        cfgmod.load_config(str(bad))


def test_hole_round_trip():
    for spec in [
        {"kind": "circle", "center": [0.5, 0.5], "r": 0.2},
        {"kind": "trefoil", "center": [0.3, 0.3], "r": 0.1},
        {"kind": "oscillatory", "center": [0.72, 0.353], "r": 0.126, "omega": 6},
    ]:
        hole = cfgmod.hole_from_spec(spec)
        assert cfgmod.hole_from_spec(cfgmod.hole_to_spec(hole)) == hole


def test_terms(tmp_path):
    (tmp_path / "g.csv").write_text("g\n1\n2\n")
    cfg = minimal(
        boundary_data={
            "terms": [
                {"type": "constant", "value": 2},
                {"type": "single_layer", "psi": ["sin(t)"], "coef": -1},
                {"type": "green_sum", "centers": [[0.1, 0.1]], "coefs": [1]},
                {"type": "csv", "path": "g.csv"},
            ]
        }
    )
    terms = cfgmod.build_terms(cfgmod.validate(cfg), tmp_path)
    assert [type(t) for t in terms] == [Constant, SingleLayer, GreenSum, Samples]
    assert terms[3].values == (1.0, 2.0)


def test_term_errors(tmp_path):
    cfg = minimal(boundary_data={"terms": [{"type": "green_sum", "centers": [[0.1, 0.1]], "coefs": [1, 2]}]})
    with pytest.raises(ConfigurationError, match="differ in length"):
        cfgmod.build_terms(cfg)
    (tmp_path / "g.csv").write_text("h\n1\n")
    cfg = minimal(boundary_data={"terms": [{"type": "csv", "path": "g.csv"}]})
    with pytest.raises(ConfigurationError, match="no column"):
        cfgmod.build_terms(cfg, tmp_path)
    with pytest.raises(ConfigurationError):
        cfgmod.build_terms(minimal(boundary_data={"terms": [{"type": "expr", "expr": "x +"}]}))


def test_build_problem():
    cfg = minimal(betas=[[0.1, 0.1]], neumann={"convention": "pinned", "pin": {"point": [0.1, 0.9], "value": 2}})
    cfg["problem"] = "neumann"
    p = cfgmod.build_problem(cfgmod.validate(cfg))
    assert p.kind == "neumann" and p.convention == "pinned" and p.betas == (0.1 + 0.1j,)
    assert cfgmod.pin_of(cfg) == (0.1 + 0.9j, 2)


def test_random_holes_deterministic():
    cfg = {"torus": {"tau": [0, 1]}, "random_holes": {"count": 4, "seed": 3}, "problem": "steklov"}
    torus = cfgmod.build_torus(cfgmod.validate(cfg))
    assert cfgmod.build_holes(cfg, torus) == cfgmod.build_holes(json.loads(json.dumps(cfg)), torus)


def test_defaults_do_not_mutate():
    cfg = minimal()
    out = cfgmod.with_defaults(cfg)
    assert out["nodes_per_hole"] == 50 and "nodes_per_hole" not in cfg
    assert cfgmod.nodes_of(cfg) == 50 and cfgmod.nodes_of({"nodes_per_hole": [10, 20]}) == [10, 20]
    assert cfgmod.nodes_of(cfg, 12) == 12
