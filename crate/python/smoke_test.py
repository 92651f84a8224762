"""Smoke test for the pyhyperwidth extension module."""

from fractions import Fraction

import pyhyperwidth as hw


def main():
    tri = hw.Hypergraph({"ab": ["a", "b"], "bc": ["b", "c"], "ca": ["c", "a"]})
    assert tri.num_vertices == 3 and tri.rank == 2
    assert tri.cover_number(["a", "b", "c"])[0] == 2
    value, weights = tri.fractional_cover_number(["a", "b", "c"])
    assert value == Fraction(3, 2) and sum(weights.values()) == value

    td = hw.approx(tri, Fraction(3, 2), "fhw")
    assert isinstance(td, hw.Decomposition) and td.is_valid()
    assert td.width <= 4 * Fraction(3, 2) + 1
    again = hw.Decomposition.parse(tri, td.to_text())
    assert again.violations() == []

    assert hw.exact_ghw_width(tri).width == 2
    assert hw.exact_fhw_width(tri).width == Fraction(3, 2)

    path = hw.Hypergraph([[str(i), str(i + 1)] for i in range(1, 9)])
    out = hw.approx(path, 1, "ghw4")
    assert out.ghw_width() <= 4 and out.invocations >= 1

    k44 = hw.Hypergraph([[f"u{u}", f"v{v}"] for u in range(4) for v in range(4)])
    refusal = hw.approx(k44, 1, "ghw4")
    assert isinstance(refusal, hw.Refusal) and not refusal and refusal.witness

    g = hw.Hypergraph.generate(11, 9, 3, 42)
    assert g.is_connected() and hw.Hypergraph.parse(g.to_text()).edges == g.edges

    try:
        hw.exact_ghw_width(k44, max_vertices=4)
    except hw.BudgetExceeded:
        pass
    else:
        raise AssertionError("budget not enforced")
    try:
        hw.approx(tri, Fraction(1, 2), "ghw4")
    except ValueError:
        pass
    else:
        raise AssertionError("fractional k accepted for ghw4")

    print("smoke test passed")


if __name__ == "__main__":
    main()
