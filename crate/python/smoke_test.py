"""Quick check that the extension imports and reproduces the sl2r example."""

import jacquet


def main():
    assert sorted(jacquet.catalog()) == ["sl2c", "sl2r", "sl3r", "sp4r"]

    alg = jacquet.Algebra("sl2r")
    assert (alg.rank, alg.dim, alg.weyl_order) == (1, 3, 2)

    module = jacquet.Module(alg, ["3/4"])
    assert module.rank == 2 and module.regular

    bv = module.boundary_map(10)
    assert bv.eigenvalues == [["5/4"], ["-1/4"]]
    qbar = bv.to_json()["Qbar"][0]["entries"]
    assert qbar[0][0] == "5/2" and qbar[1][1] == "-1/2"
    ok, checks = bv.verify()
    assert ok, [c for c in checks if not c[1]]

    split = jacquet.Module(alg, [2]).boundary_map(12).split_test()
    assert split["verdict"] == "does_not_split_within_horizon"
    assert "probe" in split

    code, report = jacquet.run(["filtration", "--algebra", "sl3r", "--lambda", "5/2,7/3", "-k", "4"])
    assert code == 0, report["error"]
    assert report["sections"]["filtration"]["direct_sum"]

    try:
        jacquet.Algebra("g2")
    except jacquet.JacquetError as e:
        assert "unknown_algebra" in str(e)
    else:
        raise AssertionError("unknown algebra accepted")

    print("smoke test ok")


if __name__ == "__main__":
    main()
