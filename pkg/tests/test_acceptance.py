"""One check per acceptance criterion; each prints a single pass/fail line."""

import pytest

from rrgroupoid import char_map, formal_germs, gelfand_fuchs as gf, hopf_cm, hopf_cyclic
from rrgroupoid import surface_numeric as sn


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print("\nCRITERION %d %s: %s%s" % (number, "PASS" if ok else "FAIL", title,
                                              " (%s)" % detail if detail else ""))
        assert ok, detail
    return emit


def _all_passed(rep: dict) -> bool:
    return all(r["passed"] for r in rep.values())


def test_criterion_1_gelfand_fuchs_table(report):
    table = gf.cohomology_table(3)
    dims = tuple(table[k].dimension if k in table else 0 for k in range(6))
    rest = all(g.dimension == 0 for k, g in table.items() if k > 5)
    reps = all(gf.matches_class(rep, k) for k, rep in gf.reference_representatives().items())
    report(1, "Gelfand-Fuchs dims and representatives", dims == (1, 0, 1, 1, 0, 1) and rest and reps,
           "dims %s, higher degrees zero: %s, representatives: %s" % (dims, rest, reps))


def test_criterion_2_hopf_axioms(report):
    rep = hopf_cm.verify_hopf_axioms(4)
    report(2, "Hopf axioms on PBW monomials of degree <= 4", _all_passed(rep),
           ", ".join("%s %s" % (k, v["passed"]) for k, v in rep.items()))


def test_criterion_3_cyclic_module(report):
    cyc = hopf_cyclic.verify_cyclicity(3)
    bic = hopf_cyclic.verify_bicomplex(3)
    report(3, "(tau_n)^(n+1) = id, b^2 = B^2 = bB + Bb = 0",
           _all_passed(cyc) and _all_passed(bic),
           ", ".join("%s %s" % (k, v["passed"]) for k, v in {**cyc, **bic}.items()))


def test_criterion_4_model_compatibility(report):
    rep = formal_germs.verify_model_compatibility(seed=0, pairs=30)
    report(4, "Delta h (a1 (x) a2) = h(a1 a2) in the germ model", _all_passed(rep),
           ", ".join("%s %d" % (k, v["checked"]) for k, v in rep.items()))


def test_criterion_5_characteristic_map(report):
    rep = char_map.charmap_report()
    report(5, "C(1), C(c1) and the Phi integrands", _all_passed(rep),
           "%d/%d checks" % (sum(r["passed"] for r in rep.values()), len(rep)))


def test_criterion_6_numeric_cocycles(report):
    rep = {**sn.surface_cocycle_checks(0, 48, 1e-6), **sn.bundle_cocycle_checks(0, 56, 1e-3)}
    worst = max(rep.items(), key=lambda kv: kv[1]["value"] / kv[1]["tol"])
    report(6, "b and cyclicity residuals on the sphere and on P", _all_passed(rep),
           "worst %s = %.1e (tol %.0e)" % (worst[0], worst[1]["value"], worst[1]["tol"]))


def test_criterion_7_sphere_suite(report):
    rep = sn.sphere_morita_checks(0, 96)
    report(7, "Morita idempotent, theta, witness, volume independence", _all_passed(rep),
           ", ".join("%s %.1e" % (k, v["value"]) for k, v in rep.items()))


def test_criterion_8_index_pairing(report):
    rows = [sn.riemann_roch_check(d, 48, 1e-3) for d in (0, 1, 2)]
    ok = all(r["passed"] for r in rows)
    report(8, "pairing(2[Sigma] + e, bott(d)) = 2(d+1)", ok,
           ", ".join("d=%d: %.6f" % (r["degree"], r["value"].real) for r in rows))


def test_criterion_9_gauss_bonnet(report):
    rep = sn.gauss_bonnet_checks(48, 1e-6)
    report(9, "(1/2 pi i) int R = 2, conformally invariant", _all_passed(rep),
           ", ".join("%s chi=%.10f" % (k, v["chi"]) for k, v in rep.items()))
