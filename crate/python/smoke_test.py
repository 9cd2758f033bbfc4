"""Smoke test for the lcslab Python extension.

Build and install first:  pip install --no-build-isolation crates/python
"""

import lcslab


def main() -> None:
    # Exact invariant calculus on the Inoue model.
    sol = lcslab.LieModel.named("sol41")
    assert sol.dim == 4
    assert sol.taming(1.0)["feasible"]
    assert not sol.taming(0.0)["feasible"]
    betti = sol.twisted_betti(1.0)
    assert sum((-1) ** d * b for d, b in enumerate(betti)) == 0

    # Constant drift on the circle: λ₀ equals the potential.
    e = lcslab.principal_eigenvalue(32, [1.5], potential=0.5, scheme="centered")
    assert abs(e["lambda0"] - 0.5) < 1e-9, e["lambda0"]
    assert min(e["u0"]) > 0

    # Constant Lee form 2dx₁ on T²: the taming class sits at t = 2.
    cert = lcslab.find_taming(8, theta=[2.0, 0.0])
    assert abs(cert["t_star"] - 2.0) < 1e-6
    assert cert["degree"] < 0

    # Hopf potential family.
    hopf = lcslab.HopfModel(0.5, 0.5)
    z1, z2 = complex(0.3, -0.2), complex(0.1, 0.7)
    assert hopf.lck_residual(1.5, z1, z2) < 1e-8
    assert abs(hopf.lee_norm2(3.0, z1, z2) - 1.0) < 1e-10
    assert abs(hopf.automorphy_ratio(z1, z2) - 0.25) < 1e-12
    assert hopf.potential_form(1.0, z1, z2)["taming_min_eig"] > 0

    # Whole scenarios, as the CLI runs them.
    assert "inoue-sol41" in lcslab.scenarios()
    rep = lcslab.run_scenario("perron-eig", scenario="perron-t1-drift")
    assert rep["passed"] and rep["status"] == "ok"
    try:
        lcslab.run_scenario("lcs-find", scenario="perron-t1-drift")
    except lcslab.LcslabError as err:
        assert "catalog:scenarios.json:" in str(err)
    else:
        raise AssertionError("mismatched scenario accepted")

    print("lcslab smoke test: ok", f"(λ₀ = {e['lambda0']:.6f}, t* = {cert['t_star']:.6f})")


if __name__ == "__main__":
    main()
