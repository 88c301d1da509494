"""Smoke test for the lgcy_py extension. Run after `maturin develop`."""

import lgcy_py as lg


def main():
    s = lg.ISeries("cubic33", "hybrid", 0)
    assert len(s) == 1 and s.f_max == "1/1"
    assert s.coefficients() == [("1/1", 1, 1, 0, "1/1")]

    i = lg.ISeries("cubic33", "hybrid", 9)
    op = lg.PFOperator("cubic33", "hybrid")
    rep = op.check(i)
    assert rep["zero"], rep["verified_through"]
    m = i.mirror()
    assert m["normal_form"]
    assert {"f": "4/1", "t_power": 0, "value": "1/26244"} in m["omega1"]

    assert lg.pf_check("quadric2222", "gw", 20)["zero"]
    assert lg.statespace("quadric2222")["dim_h3"] == 132
    assert lg.euler_characteristic([5], 4) == -200
    assert lg.selection_rule("cubic33", [1, 2, 1])
    assert lg.n_theta("cubic33", [1, 2]) == 0
    assert lg.virtual_dimension("cubic33", [1, 1, 1], degree=1)["direct"] == "3/1"
    assert lg.yukawa("quadric2222")["instanton_numbers"][0] == "512/1"

    c = lg.connection_matrix("cubic33", digits=30)
    assert c["digits"] == 30 and len(c["matrix"]) == 4
    assert max(c["diagnostics"][k] for k in ("solve_residual", "endpoint_consistency")) < 1e-20
    mz = lg.monodromy("cubic33", "zero", 30)
    assert mz["matrix"][0][1].endswith("j") and "+6.28318530717958" in mz["matrix"][0][1]

    try:
        lg.ISeries("quintic", "hybrid", 3)
    except ValueError as e:
        assert "unsupported_case" in str(e)
    else:
        raise AssertionError("quintic hybrid series should fail")

    print("lgcy_py smoke test ok")


if __name__ == "__main__":
    main()
