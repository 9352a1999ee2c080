"""Acceptance criteria, one test per criterion, one printed verdict line each.

Run with plain pytest; the verdict lines bypass capture so they always show.
"""

import json
import math
import time
from fractions import Fraction

import pytest

from _corpus import corpus
from ckspec.cli import main as cli_main
from ckspec.exact import (INF, CirclePoint, ExactRadius, QPoint,
                          RationalComplex, is_infinite)
from ckspec.fixtures import NAMES, fixture_text, load_fixture
from ckspec.model import Anchor, Cycle, OrbitModel, Ray, core_sets, validate
from ckspec.oracle import (chain_defect_dim, chain_kernel_dim, in_certificate,
                           out_certificate)
from ckspec.radialset import RadialSet, intersect, union
from ckspec.spectra import essential_spectra, self_check, zero_analysis

RC = RationalComplex.of
Q = QPoint.of
ER = ExactRadius.from_fraction


def verdict(capsys, ok: bool, label: str, detail: str):
    with capsys.disabled():
        print(f"\nACCEPTANCE {label}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{label}: {detail}"


@pytest.fixture(scope="module")
def models100():
    return corpus(100)


def test_criterion_1_example_reproduction(capsys):
    t0 = time.perf_counter()
    rep = essential_spectra(load_fixture("half"))
    disk = RadialSet.disk(ER(1))
    circle = RadialSet.circle(ER(1))
    ok = (rep.sigma == disk and rep.sigma_2 == disk and rep.sigma_3 == disk
          and rep.sigma_4 == disk and rep.sigma_5 == disk
          and rep.sigma_1 == circle and rep.sigma_2_prime == circle)
    dt = time.perf_counter() - t0
    ok = ok and dt < 1.0
    verdict(capsys, ok, "1 (closed-form reproduction on HALF)",
            f"all seven sets exact, {dt:.3f}s")


def test_criterion_2_structural_identities(capsys, models100):
    t0 = time.perf_counter()
    failures = []
    for m in models100:
        rep = essential_spectra(m)
        s = rep
        checks = [
            s.sigma_1 == intersect(s.sigma_2, s.sigma_2_prime),
            s.sigma_3 == union(s.sigma_2, s.sigma_2_prime),
            s.sigma_1.issubset(s.sigma_2),
            s.sigma_2.issubset(s.sigma_4),
            s.sigma_1.issubset(s.sigma_3),
            s.sigma_3.issubset(s.sigma_4),
            s.sigma_4.issubset(s.sigma_5),
            s.sigma_5.issubset(s.sigma),
            s.sigma == union(s.sigma_m, s.sigma_l),
        ]
        radii = [x.max_radius() for x in (s.sigma_1, s.sigma_2, s.sigma_2_prime,
                                          s.sigma_3, s.sigma_4, s.sigma_5)]
        checks.append(all(r == radii[0] for r in radii[1:]))
        if not all(checks):
            failures.append(m.name)
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60.0
    verdict(capsys, ok, "2 (structural identities, 100 random models)",
            f"failures={failures[:3]}, {dt:.1f}s")


def test_criterion_3_engine_oracle_equivalence(capsys, models100):
    t0 = time.perf_counter()
    bad = []
    for m in models100:
        msgs = self_check(m)
        if msgs:
            bad.append((m.name, msgs[0]))
    dt = time.perf_counter() - t0
    verdict(capsys, not bad, "3 (engine equals chain oracle on sampled grid)",
            f"mismatches={bad[:2]}, {dt:.1f}s")


def test_criterion_4_zero_classification(capsys):
    expected = {
        # fixture: (upper, lower, dim_ker, defect, 0 is weyl)
        "ray1": (True, True, 1, 0),
        "half": (False, True, INF, 0),
        "zero": (True, True, 2, 1),
        "bundlezero": (False, False, INF, INF),
    }
    problems = []
    for name, (up, low, ker, dfc) in expected.items():
        m = load_fixture(name)
        z = zero_analysis(m)
        cs = core_sets(m)
        lam0 = Q(0)
        checks = [
            z.upper == up, z.lower == low,
            z.dim_ker == ker, z.defect == dfc,
            z.dim_ker == chain_kernel_dim(m, lam0),
            z.defect == chain_defect_dim(m, lam0),
            # dim ker = card(sources u zeros), defect = card Z(w)
            z.dim_ker == (INF if (is_infinite(cs.sources_count)
                                  or is_infinite(cs.z_w_count))
                          else cs.sources_count + cs.z_w_count),
            z.defect == cs.z_w_count,
            # index-zero criterion: Weyl at 0 iff Fredholm and w == 0 on the
            # complement of the image
            z.weyl == z.weyl_criterion,
            essential_spectra(m).sigma_5.member(lam0),
        ]
        if not all(checks):
            problems.append((name, checks))
    verdict(capsys, not problems, "4 (classification at lambda = 0)",
            f"problems={problems}")


def _cluster_model(name, weights):
    cyc = Cycle("P", tuple(RC(w) for w in weights))
    return validate(OrbitModel(name, (cyc,),
                               (Ray("r", "forward", 1, Anchor("P", 0)),)))


def _ladder_model():
    return validate(OrbitModel("ladder", (
        Cycle("A", (RC(1),)), Cycle("B", (RC(2),)),
        Cycle("F", (RC(Fraction(1, 4)),))), (
        Ray("s", "two_sided", 1, Anchor("B", 0), Anchor("A", 0)),
        Ray("r", "forward", 1, Anchor("F", 0)))))


def test_criterion_5_certificates(capsys):
    t0 = time.perf_counter()
    u34 = RC(Fraction(3, 5), Fraction(4, 5))
    half = load_fixture("half")
    ray1 = load_fixture("ray1")
    zero = load_fixture("zero")
    twocyc = load_fixture("twocyc")
    irr3 = _cluster_model("irr3", [1, 1, 2])         # radius 2^(1/3)
    per3c = _cluster_model("per3c", [1, 2, 4])       # radius 2
    r_irr = irr3.cycle("P").gm()
    in_pairs = [
        (half, Q(0, 1), "upper"), (half, Q(1), "upper"), (half, Q(-1), "upper"),
        (half, QPoint(u34), "upper"), (half, Q(0, 1), "lower"),
        (half, Q(-1), "lower"),
        (ray1, Q(1), "upper"), (ray1, Q(0, 1), "upper"), (ray1, Q(0, 1), "lower"),
        (zero, Q(1), "upper"), (zero, Q(-1), "upper"), (zero, Q(0, 1), "lower"),
        (twocyc, Q(0, Fraction(1, 2)), "upper"),
        (twocyc, Q(Fraction(-1, 2)), "lower"),
        (twocyc, Q(0, 2), "upper"), (twocyc, Q(-2), "lower"),
        (irr3, CirclePoint(r_irr, u34), "upper"),
        (irr3, CirclePoint(r_irr, RC(1)), "lower"),
        (per3c, Q(0, 2), "upper"), (per3c, Q(-2), "lower"),
    ]
    assert len(in_pairs) == 20
    bad = []
    for m, lam, side in in_pairs:
        res = [in_certificate(m, lam, side, horizon=n).residual_ratio
               for n in (100, 1000, 10_000)]
        if not (res[0] > res[1] > res[2] and res[2] <= 5 / math.sqrt(10_000)):
            bad.append((m.name, str(lam), side, res))
    in_dt = time.perf_counter() - t0
    ok_in = not bad and in_dt < 120.0

    out_pairs = [
        (half, Q(2)), (half, Q(3)), (half, Q(0, 2)), (half, Q(-3)),
        (half, Q(1, 1)),
        (ray1, Q(2)), (ray1, Q(0, -2)),
        (twocyc, Q(4)), (twocyc, Q(0, 3)), (twocyc, Q(-5)),
        (load_fixture("per3_isolated"), Q(3)),
        (load_fixture("per3_isolated"), Q(-2)),
        (load_fixture("per3_isolated"), Q(0, 3)),
        (load_fixture("per3_isolated"), Q(-4)),
        (zero, Q(2)), (zero, Q(0, -3)),
        (_ladder_model(), Q(Fraction(1, 2))),
        (_ladder_model(), Q(Fraction(-1, 3))),
        (_ladder_model(), Q(5)),
        (load_fixture("bundlezero"), Q(1)),
    ]
    assert len(out_pairs) == 20
    bad_out = []
    for m, lam in out_pairs:
        cert = out_certificate(m, lam, horizon=200)
        if not (cert.passed and cert.margin < 1):
            bad_out.append((m.name, str(lam)))
    dt = time.perf_counter() - t0
    ok = ok_in and not bad_out
    verdict(capsys, ok, "5 (certificate convergence and resolvent margins)",
            f"in_failures={bad[:2]}, out_failures={bad_out[:2]}, {dt:.1f}s")


def test_criterion_6_rotation_and_browder_flags(capsys, models100):
    applicable = 0
    problems = []
    for m in models100:
        rep = essential_spectra(m)
        if rep.all_cycles_ray_incident:
            applicable += 1
            sets = [rep.sigma, rep.sigma_1, rep.sigma_2, rep.sigma_2_prime,
                    rep.sigma_3, rep.sigma_4, rep.sigma_5]
            if not all(s.is_rotation_invariant() for s in sets):
                problems.append((m.name, "rotation"))
            if not rep.sigma5_equals_sigma:
                problems.append((m.name, "browder"))
    ok = not problems and applicable >= 10
    verdict(capsys, ok, "6 (rotation invariance and Browder saturation)",
            f"applicable={applicable}/100, problems={problems[:3]}")


def test_criterion_7_cli_contract(capsys, tmp_path):
    problems = []
    for name in NAMES:
        path = tmp_path / f"{name}.json"
        path.write_text(fixture_text(name), "utf-8")
        from ckspec.model import model_to_json, parse_model_json
        text1 = model_to_json(parse_model_json(path.read_text("utf-8")))
        text2 = model_to_json(parse_model_json(text1))
        if text1 != text2:
            problems.append((name, "roundtrip"))
        if cli_main(["analyze", str(path), "--self-check"]) != 0:
            problems.append((name, "self-check exit"))
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x", "cycles": [], "rays": [], "oops": 1}', "utf-8")
    if cli_main(["analyze", str(bad)]) != 1:
        problems.append(("bad input", "exit code"))
    per3 = tmp_path / "per3_isolated.json"
    if cli_main(["certify", str(per3), "--lambda", "9/4,0/1",
                 "--horizon", "4"]) != 3:
        problems.append(("short-horizon certify", "exit code"))
    capsys.readouterr()  # swallow CLI output
    verdict(capsys, not problems, "7 (CLI contract and exit codes)",
            f"problems={problems}")
