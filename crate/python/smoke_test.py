"""Smoke test for the rumourlab_py extension. Run python/build.py first."""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import rumourlab_py as rl  # noqa: E402


def close(a, b, tol=1e-12):
    return abs(a - b) <= tol


def main():
    const1 = rl.TailDistribution("const:r=1")
    assert str(const1) == "const:r=1"
    assert rl.TailDistribution.geometric(0.5).tail(3) == 0.125
    assert rl.TailDistribution.pareto(2.0).tail_functionals() == (2.0, 2.0)
    assert rl.TailDistribution.power(0.5).tail_functionals()[0] == math.inf
    draws = rl.TailDistribution.pareto(4.0).sample(5, 7)
    assert draws == rl.TailDistribution.pareto(4.0).sample(5, 7) and min(draws) >= 4

    # Site 3 on the line with unit radii: the two left neighbours are its only
    # sources, so it is under-covered unless both are open.
    assert close(rl.undercovered_prob(3, 0.5, 2, const1), 0.75)
    assert close(rl.undercovered_prob_1d_closed_form(3, 0.5, 2, const1), 0.75)
    assert close(rl.enumeration_oracle(3, 0.5, 2, const1, 1), 0.75)
    assert close(rl.uncovered_prob(3, 0.5, const1), 0.25)
    assert close(rl.poisson_binomial_fewer_than([0.5, 0.5], 2), 0.75)

    grid_exact = rl.undercovered_prob((2, 2), 0.5, 2, const1)
    grid_printed = rl.undercovered_prob_2d_paper(2, 2, 0.5, const1)
    assert close(grid_exact, 0.3125) and close(grid_printed, 0.1875)
    assert rl.shell_multiplicity_2d(2, 2, 1) == 3

    diag = rl.series_diagnostics(0.5, rl.TailDistribution.pareto(2.0), 1, 1, 256)
    assert len(diag["partial_sums"]) == 256 and diag["decay_exponent"] is not None

    geom = rl.TailDistribution.geometric(0.5)
    origin, values = rl.coverage(1, "firework", 1.0, 1, 50, rl.TailDistribution.constant(2), seed=3)
    assert origin == 1 and len(values) == 50 and all(v >= 1 for v in values)
    rows = rl.estimate_under_coverage(1, "firework", 0.5, 2, 20, geom, [1, 5, 20], 200, seed=11)
    assert [r["site"] for r in rows] == [1, 5, 20]
    assert all(r["ci_low"] <= r["frequency"] <= r["ci_high"] for r in rows)
    assert rows == rl.estimate_under_coverage(1, "firework", 0.5, 2, 20, geom, [1, 5, 20], 200, seed=11, workers=1)

    pts = rl.sample_ppp(1, 0.5, 100.0, "pareto:alpha=2", 5)
    assert all(0.0 <= x <= 100.0 and y == 0.0 for x, y, _ in pts)
    assert rl.k_cover_last_gap_1d([(0.0, 0.0, 10.0), (0.0, 0.0, 10.0)], 2, 10.0) == (None, 0.0, 0)
    frac, witness = rl.k_cover_deficit_2d([], 1, 4.0, 1.0)
    assert frac == 1.0 and witness is not None
    scan = rl.scan_lambda(1, "pareto:alpha=2", [0.1, 1.0], 4, 200.0, seed=1)
    assert [row[0] for row in scan] == [0.1, 1.0]

    spec = json.loads(rl.default_spec("exact"))
    spec.update(dist="const:r=1", sites=[3], seed=1)
    result = json.loads(rl.run_experiment(json.dumps(spec)))
    assert close(result["rows"][0]["prob"], 0.75)
    assert rl.result_to_csv(json.dumps(result)) == "i,p,k,prob,method\n3,0.5,2,0.75,dp\n"

    try:
        rl.TailDistribution("pareto:alpha=-1")
    except ValueError:
        pass
    else:
        raise AssertionError("negative alpha accepted")

    print(f"rumourlab_py {rl.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
