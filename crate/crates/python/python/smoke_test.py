"""Smoke test for the `pak` extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
then run:
    python crates/python/python/smoke_test.py
"""

import sys

import pak

TARGET = 28


def check(name, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {name}")
    return ok


def main():
    results = []
    k = pak.Field(5)
    two, three = k.int(2), k.int(3)
    results.append(check("log is additive", (two * three).log().eq_to(two.log() + three.log(), TARGET)))
    results.append(check("valuation", k.int(50).valuation() == 2 and k.ratio(1, 25).valuation() == -2))
    results.append(check("scalar tokens", k.scalar("1/2 + log(2)").eq_to(k.ratio(1, 2) + two.log(), TARGET)))

    # Res(z^-1 d(z)) = 1, antisymmetric
    f = (-1, [1], 0)
    g = (1, [1], 0)
    results.append(check("local double index", pak.laurent_double_index(5, f, g).approx() == "1"))
    results.append(check("antisymmetry", pak.laurent_double_index(5, g, f).approx() == "-1"))

    r = pak.double_index(5, "dt/t^2", "dlog (t-1)")
    locals_ = {p["point"]: p["local_index"].get("approx") for p in r["points"]}
    results.append(check("global index locals", locals_ == {"0": "1", "1": "-1", "inf": "0"}))
    results.append(check("global index vanishes", r["vanishes"]))

    results.append(check("curvature g=3", all(pak.curvature_identities(3).values())))

    case = pak.green_formula_case(7, 2, seed=1)
    results.append(check("green formula", pak.green_check_formula(7, case)))

    toml = '[character]\np = 5\nlambda = "0"\n[character.finite]\n2 = "-log(2)"\n3 = "-log(3)"\n'
    rep = pak.validate_character_toml(toml, ["2", "-3", "12/5"])
    results.append(check("standard character", rep["pass"]))

    results.append(check("rr rescale", pak.rr_rescale(7, "log(2)", 3, 2)["equal"]))
    results.append(check("codifferent Q(i)", pak.codifferent(5, -1)["consistent"]))
    results.append(check("cube annihilation", pak.cube_annihilates(3, 2) and not pak.cube_annihilates(2, 2)))

    try:
        pak.double_index(5, "dt/(t", "dt")
        results.append(check("parse error raises", False))
    except ValueError:
        results.append(check("parse error raises", True))

    print(f"{sum(results)}/{len(results)} passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
