"""Smoke test for the Python bindings. Build first with
`maturin develop -m crates/py/Cargo.toml` (or `pip install ./crates/py`)."""

import pystablepieces as sp


def main():
    rs = sp.RootSystem("B2")
    assert rs.rank == 2 and rs.positive_count == 4 and rs.weyl_order() == 8
    assert len(rs.roots()) == 8

    a1 = sp.PieceContext("A1")
    assert [p["id"] for p in a1.pieces()] == ["J={};w=e", "J={};w=s1", "J={1};w=e"]
    assert len(a1.closure("J={1};w=e")) == 3
    assert a1.strata()["strata"][0]["cone_count"] == 2

    a2 = sp.PieceContext("A2", auto="1:2,2:1")
    assert len(a2) == 13
    assert "J={};w=s1" in a2.nilcone([1, 1])
    assert all(pid.endswith("w=e") for pid in a2.semistable())
    assert a2.poset_dot().startswith('digraph "closure_poset_A2_1:2,2:1"')
    report = a2.verify(suite="all", samples=200)
    assert all(c["pass"] for c in report["checks"]), report

    for bad in (lambda: sp.PieceContext("Q2"), lambda: a2.nilcone([1, 2]), lambda: a2.strata()):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    assert sp.quotient_point([[1, 1], [0, 1]]) == ("1", "1/4")
    assert sp.classify_piece([[0, 1], [0, 0]]) == "J={};w=s1"
    oracle = sp.oracle_pgl2(samples=100, seed=42)
    assert all(c["pass"] for c in oracle["checks"])
    print("python smoke test: ok")


if __name__ == "__main__":
    main()
