"""Smoke test for the `tori` extension module.

Build and install with `pip install --no-build-isolation -e crates/py`, then
run `python python/smoke_test.py`.
"""

import pathlib

import tori

EXAMPLES = pathlib.Path(__file__).resolve().parent.parent / "crates" / "cli" / "examples"


def main() -> None:
    t = tori.example1(1)
    assert t.classify() == ("ImaginaryQuadratic", ["-1"])
    assert t.ns_rank() == 2
    assert t.is_algebraic()["kind"] == "not_algebraic"

    q = tori.example2(1, 2)
    assert q.endomorphisms()["rank"] == 4
    assert q.classify()[0] == "DefiniteQuaternion"

    s = tori.scalar_cm_product(1)
    assert s.ns_rank() == 4
    assert s.nd(0)["rank"] == 2
    cor = {c["id"]: c["status"] for c in s.verify_corollaries()}
    assert cor["corollary3.real_multiplication"] == "verified"

    r = tori.Torus.from_json((EXAMPLES / "random_d2_seed1.json").read_text())
    claims = r.verify_proposition(0)
    assert all(c["status"] == "verified" for c in claims), claims
    assert r.polarize() is not None
    assert tori.Torus.from_json(r.to_json()).period() == r.period()

    try:
        tori.Torus.from_json('{"generators": [], "period": [["0.5", "0", "0", "0"], ["0", "0", "0", "0"]]}')
    except tori.ToriError as e:
        assert e.args[0] == "Validation"
    else:
        raise AssertionError("float literal accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
