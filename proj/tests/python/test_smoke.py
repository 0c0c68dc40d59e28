import math
import os
import subprocess
from pathlib import Path

import pytest

import pbn

HERE = Path(__file__).resolve().parent
FIXTURES = Path(os.environ.get("PBN_FIXTURE_DIR", HERE.parent / "fixtures"))
GOLDEN = Path(os.environ.get("PBN_GOLDEN_DIR", HERE.parent / "golden"))


def die():
    return pbn.DiscreteSpace([str(i) for i in range(1, 7)], [1 / 6] * 6, True)


def test_versions():
    assert pbn.GRAMMAR_VERSION == "pbn-1"
    assert pbn.SCHEMA_VERSION == "model-schema-1"


def test_bracket_and_bayes():
    d = die()
    assert pbn.bracket(d, ["2"], ["1", "2", "3"]) == pytest.approx(1 / 3, abs=1e-15)
    assert pbn.bayes(d, ["2", "4", "6"], ["1", "2", "3"]) == pytest.approx(1 / 3, abs=1e-15)
    assert pbn.event_prob(d, ["2", "4", "6"]) == pytest.approx(0.5, abs=1e-15)


def test_errors_carry_kind():
    d = die()
    with pytest.raises(pbn.PbnError, match="ZeroConditioningEvent"):
        pbn.bracket(d, ["1"], [])
    with pytest.raises(pbn.PbnError, match="NormalizationViolation"):
        pbn.DiscreteSpace(["a", "b"], [0.5, 0.6])


def test_expectations():
    d = die()
    x = pbn.Observable([1, 2, 3, 4, 5, 6])
    assert pbn.expectation(d, x) == pytest.approx(3.5)
    assert pbn.conditional_expectation(d, x, ["1", "2", "3"]) == pytest.approx(2.0)


def test_dtmc_and_ctmc():
    p = pbn.TransitionMatrix([[0.5, 0.5], [0.25, 0.75]])
    assert pbn.dtmc_evolve_row([1, 0], p, 2) == pytest.approx([0.375, 0.625], abs=1e-15)
    assert pbn.stationary(p) == pytest.approx([1 / 3, 2 / 3], abs=1e-12)
    g = pbn.Generator([[-1, 1], [2, -2]])
    p0 = 2 / 3 + (1 / 3) * math.exp(-3)
    assert pbn.ctmc_evolve([1, 0], g, 1.0)[0] == pytest.approx(p0, abs=1e-10)


def test_ctmc_matches_scipy_expm():
    np = pytest.importorskip("numpy")
    sl = pytest.importorskip("scipy.linalg")
    q = np.array([[-1.0, 0.5, 0.5], [0.2, -0.7, 0.5], [1.0, 1.0, -2.0]])
    g = pbn.Generator(q.tolist())
    for t in (0.3, 2.0):
        ref = np.array([1.0, 0.0, 0.0]) @ sl.expm(q * t)
        assert np.allclose(pbn.ctmc_evolve([1, 0, 0], g, t), ref, atol=1e-10)


def test_query_language():
    assert pbn.canonical("P( {1, 2} | Omega @ 3 )") == "P({1,2}|Omega@3)"
    m = pbn.load_model(str(FIXTURES / "dtmc2.json"))
    assert m.kind == "dtmc"
    assert m.eval("P(Omega|X|Omega@2)") == pytest.approx(0.625, abs=1e-15)
    with pytest.raises(pbn.PbnError, match="LexError"):
        m.eval("P(A ? B)")


def test_run_cli():
    code, out, _ = pbn.run_cli(["eval", str(FIXTURES / "die.json"), "P({2}|{1,2,3})"])
    assert (code, out) == (0, "0.333333333333333\n")
    code, _, _ = pbn.run_cli(["stationary", str(FIXTURES / "reducible.json")])
    assert code == 2


@pytest.mark.parametrize("name", ["dtmc2", "ctmc2", "birth"])
def test_golden_csv_matches_reference_solution(name):
    """Golden trajectories agree with an independent scipy/numpy solution."""
    import json

    np = pytest.importorskip("numpy")
    sl = pytest.importorskip("scipy.linalg")
    model = json.loads((FIXTURES / f"{name}.json").read_text())
    d = np.array(model["dynamics"], dtype=float)
    u0 = np.array([model["measure"][s] for s in model["states"]], dtype=float)
    obs = next(iter(model["observables"].values()))
    x = np.array([obs[s] for s in model["states"]], dtype=float)
    rows = (GOLDEN / f"{name}.csv").read_text().splitlines()[1:]
    for row in rows:
        vals = [float(v) for v in row.split(",")]
        t = vals[0]
        if model["kind"] == "dtmc":
            u = u0 @ np.linalg.matrix_power(d, int(t))
        else:
            u = u0 @ sl.expm(d * t)
        assert np.allclose(vals[1:], np.append(u, u @ x), atol=1e-10, rtol=0)


def test_cli_binary_if_built():
    exe = os.environ.get("PBN_CLI")
    if not exe:
        pytest.skip("CLI path not provided")
    res = subprocess.run([exe, "check", str(FIXTURES / "ctmc2.json")], capture_output=True, text=True)
    assert res.returncode == 0
    assert "FAIL" not in res.stdout
