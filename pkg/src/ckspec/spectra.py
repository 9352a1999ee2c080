"""The classification engine: spectrum and essential spectra of the weighted
composition operator presented by a validated model.

The transient part of the spectrum is a closed disk whose radius is the
largest cluster radius; the invertible part contributes, per weakly
connected component of the eventual image, either the root set of a bare
cycle or the annulus spanned by the component's cycle radii.  The five
essential spectra are assembled from the finitely many critical radii (the
cycle geometric means): upper semi-Fredholmness fails exactly on cluster
circles, below bundle clusters, and on ray-incident circles of the eventual
image; lower semi-Fredholmness fails on boundary-cycle circles and the same
eventual-image circles.  Between consecutive critical radii every
classification is constant, so one exact rational sample per stratum pins
the Fredholm index there; Browder removal keeps only those complement
components of the semi-Fredholm spectrum that stay inside the spectrum.

Every region decision made here is re-verifiable pointwise against the chain
solvers in :mod:`ckspec.oracle`; ``self_check`` runs that grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exact import (INF, CirclePoint, ExactRadius, QPoint, RationalComplex,
                    RootPoint, SpectralPoint, is_infinite, rational_between)
from .model import OMEGA, ValidatedModel, core_sets
from .oracle import chain_defect_dim, chain_kernel_dim
from .radialset import (RadialSet, canonicalize, complement_components,
                        intersect, remove_open_gap_traces, render_svg, union)


class InternalInconsistency(Exception):
    """Engine and pointwise oracle recheck disagree; must never fire."""


def _dim_add(a, b):
    if is_infinite(a) or is_infinite(b):
        return INF
    return a + b


def fmt_dim(d) -> str:
    return "infinite" if is_infinite(d) else str(d)


@dataclass
class FredholmData:
    lam: str
    upper: bool
    lower: bool
    dim_ker: object
    defect: object
    index: int | None

    def to_json(self) -> dict:
        return {"lambda": self.lam, "upper": self.upper, "lower": self.lower,
                "dim_ker": fmt_dim(self.dim_ker), "defect": fmt_dim(self.defect),
                "index": self.index}


@dataclass
class ZeroReport:
    """Classification of the operator itself (lam == 0)."""

    upper: bool
    lower: bool
    dim_ker: object
    defect: object
    index: int | None
    weight_vanishes_on_sources: bool
    weyl: bool
    weyl_criterion: bool  # Fredholm and w == 0 on every source
    in_sigma5: bool = True

    def to_json(self) -> dict:
        return {"upper": self.upper, "lower": self.lower,
                "dim_ker": fmt_dim(self.dim_ker), "defect": fmt_dim(self.defect),
                "index": self.index,
                "weight_vanishes_on_sources": self.weight_vanishes_on_sources,
                "weyl": self.weyl, "weyl_criterion": self.weyl_criterion,
                "in_sigma5": self.in_sigma5}


@dataclass
class StratumRow:
    lo: ExactRadius
    hi: ExactRadius | None
    sample: Fraction
    data: FredholmData

    def to_json(self) -> dict:
        return {"lo": self.lo.to_json(),
                "hi": None if self.hi is None else self.hi.to_json(),
                "sample": [self.sample.numerator, self.sample.denominator],
                **self.data.to_json()}


@dataclass
class SpectralReport:
    model: str
    sigma: RadialSet
    sigma_m: RadialSet
    sigma_l: RadialSet
    sigma_1: RadialSet
    sigma_2: RadialSet
    sigma_2_prime: RadialSet
    sigma_3: RadialSet
    sigma_4: RadialSet
    sigma_5: RadialSet
    rotation_invariant: bool
    all_cycles_ray_incident: bool
    sigma5_equals_sigma: bool
    sigma3_equals_sigma: bool
    zero: ZeroReport
    critical_radii: list[ExactRadius] = field(default_factory=list)
    strata: list[StratumRow] = field(default_factory=list)

    def named_sets(self) -> list[tuple[str, RadialSet]]:
        return [("sigma", self.sigma), ("sigma_1", self.sigma_1),
                ("sigma_2", self.sigma_2), ("sigma_2'", self.sigma_2_prime),
                ("sigma_3", self.sigma_3), ("sigma_4", self.sigma_4),
                ("sigma_5", self.sigma_5)]

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "model": self.model,
            "sigma": self.sigma.to_json(),
            "sigma_m": self.sigma_m.to_json(),
            "sigma_l": self.sigma_l.to_json(),
            "sigma_1": self.sigma_1.to_json(),
            "sigma_2": self.sigma_2.to_json(),
            "sigma_2_prime": self.sigma_2_prime.to_json(),
            "sigma_3": self.sigma_3.to_json(),
            "sigma_4": self.sigma_4.to_json(),
            "sigma_5": self.sigma_5.to_json(),
            "rotation_invariant": self.rotation_invariant,
            "flags": {
                "all_cycles_ray_incident": self.all_cycles_ray_incident,
                "sigma5_equals_sigma": self.sigma5_equals_sigma,
                "sigma3_equals_sigma": self.sigma3_equals_sigma,
            },
            "zero_report": self.zero.to_json(),
            "critical_radii": [r.to_json() for r in self.critical_radii],
            "strata": [row.to_json() for row in self.strata],
        }

    def to_text(self) -> str:
        lines = [f"model: {self.model}"]
        for name, s in [("sigma     ", self.sigma), ("sigma_M   ", self.sigma_m),
                        ("sigma_L   ", self.sigma_l), ("sigma_1   ", self.sigma_1),
                        ("sigma_2   ", self.sigma_2),
                        ("sigma_2'  ", self.sigma_2_prime),
                        ("sigma_3   ", self.sigma_3), ("sigma_4   ", self.sigma_4),
                        ("sigma_5   ", self.sigma_5)]:
            lines.append(f"  {name} = {s.describe()}")
        z = self.zero
        lines.append("at lambda = 0:")
        lines.append(f"  upper={z.upper} lower={z.lower} "
                     f"dim_ker={fmt_dim(z.dim_ker)} defect={fmt_dim(z.defect)} "
                     f"index={z.index} in_sigma5={z.in_sigma5}")
        lines.append(f"  weight vanishes on sources: "
                     f"{z.weight_vanishes_on_sources}; weyl={z.weyl} "
                     f"(criterion: {z.weyl_criterion})")
        lines.append(f"rotation invariant: {self.rotation_invariant}")
        lines.append(f"all cycles ray-incident: {self.all_cycles_ray_incident} "
                     f"-> sigma_5 == sigma: {self.sigma5_equals_sigma}")
        lines.append("index by radial stratum:")
        for row in self.strata:
            hi = "inf" if row.hi is None else str(row.hi)
            d = row.data
            lines.append(f"  ({row.lo}, {hi}): sample {row.sample}: "
                         f"upper={d.upper} lower={d.lower} "
                         f"dim_ker={fmt_dim(d.dim_ker)} defect={fmt_dim(d.defect)} "
                         f"index={d.index}")
        return "\n".join(lines)

    def to_svg(self) -> str:
        return render_svg(self.named_sets())


# ---------------------------------------------------------------------------
# spectrum pieces


def sigma_M(m: ValidatedModel) -> RadialSet:
    radius = ExactRadius.zero()
    for cid in m.n_cycle_ids():
        g = m.cycle(cid).gm()
        if g > radius:
            radius = g
    return RadialSet.disk(radius)


def sigma_L(m: ValidatedModel) -> RadialSet:
    ann = []
    roots = []
    for comp in m.l_components():
        gms = [m.cycle(cid).gm() for cid in comp["cycles"]]
        if comp["rays"]:
            ann.append((min(gms), max(gms)))
            for rid in comp["rays"]:
                ray = m.rays[rid]
                if m.ray_has_zero(ray):
                    # a vanishing weight cuts the two-sided chain: the upper
                    # half carries eigenvectors below gm(omega end), the
                    # lower half dual vectors below gm(alpha end)
                    d = m.cycle(ray.omega.cycle).gm()
                    d_a = m.cycle(ray.alpha.cycle).gm()
                    if d_a > d:
                        d = d_a
                    ann.append((ExactRadius.zero(), d))
        else:
            cyc = m.cycle(comp["cycles"][0])
            roots.append((cyc.weight_product(), cyc.period))
    return canonicalize(annuli=ann, root_sets=roots)


def sigma_total(m: ValidatedModel) -> RadialSet:
    return union(sigma_M(m), sigma_L(m))


# ---------------------------------------------------------------------------
# pointwise classification


def zero_analysis(m: ValidatedModel) -> ZeroReport:
    cs = core_sets(m)
    z_isolated = not is_infinite(cs.z_w_count)
    sources_finite = not is_infinite(cs.sources_count)
    upper = z_isolated and sources_finite
    lower = z_isolated
    dim_ker = _dim_add(cs.sources_count, cs.z_w_count)
    defect = cs.z_w_count
    fred = upper and lower
    index = dim_ker - defect if fred else None
    vanish = True
    for ray in m.forward_rays():
        if not m.ray_weight(ray, 0, 0).is_zero:
            vanish = False
        if (ray.multiplicity == OMEGA or ray.multiplicity > 1) \
                and not m.ray_weight(ray, 0, 1).is_zero:
            vanish = False
    return ZeroReport(upper=upper, lower=lower, dim_ker=dim_ker, defect=defect,
                      index=index, weight_vanishes_on_sources=vanish,
                      weyl=fred and index == 0, weyl_criterion=fred and vanish)


def _upper_at(m: ValidatedModel, lam: SpectralPoint) -> bool:
    mod = lam.modulus()
    for cid in m.n_cycle_ids():
        g = m.cycle(cid).gm()
        if g == mod:
            return False  # the cluster circle cannot be split away
        if g > mod and any(r.multiplicity == OMEGA for r in m.rays_into(cid)):
            return False  # infinitely many sources on the inner part
    for cid in m.l_ray_incident_ids():
        if m.cycle(cid).gm() == mod:
            return False  # upper failure inside the eventual image
    return True


def _lower_at(m: ValidatedModel, lam: SpectralPoint) -> bool:
    mod = lam.modulus()
    for cid in m.n_cycle_ids():
        if m.cycle(cid).gm() == mod:
            return False  # lam*T meets the boundary-cycle point spectrum
    for cid in m.l_ray_incident_ids():
        if m.cycle(cid).gm() == mod:
            return False
    return True


def _heads_above(m: ValidatedModel, lam: SpectralPoint):
    """Sources in clusters strictly above |lam| (the transient kernel count)."""
    mod = lam.modulus()
    total = 0
    for ray in m.forward_rays():
        if m.cycle(ray.omega.cycle).gm() > mod:
            if ray.multiplicity == OMEGA:
                return INF
            total += ray.multiplicity
    return total


def fredholm_data(m: ValidatedModel, lam: SpectralPoint) -> FredholmData:
    """Classify lam by the structural characterizations (not by the chains).

    dim_ker/defect are the dimensions of ker(lam I - T) and ker(lam I - T'),
    assembled as eventual-image part plus transient sources; they equal the
    codimension data whenever the corresponding semi-Fredholm flag holds.
    """
    if lam.is_zero:
        z = zero_analysis(m)
        return FredholmData("0", z.upper, z.lower, z.dim_ker, z.defect, z.index)
    upper = _upper_at(m, lam)
    lower = _lower_at(m, lam)
    dim_ker = _dim_add(chain_kernel_dim(m, lam, l_only=True), _heads_above(m, lam))
    defect = chain_defect_dim(m, lam, l_only=True)
    index = None
    if upper and lower:
        index = dim_ker - defect
    return FredholmData(str(lam), upper, lower, dim_ker, defect, index)


# ---------------------------------------------------------------------------
# assembly


def critical_radii(m: ValidatedModel) -> list[ExactRadius]:
    seen = {ExactRadius.zero()}
    for cyc in m.cycles.values():
        seen.add(cyc.gm())
    out = list(seen)
    # insertion sort with exact comparisons
    for i in range(1, len(out)):
        j = i
        while j > 0 and out[j] < out[j - 1]:
            out[j], out[j - 1] = out[j - 1], out[j]
            j -= 1
    return out


def essential_spectra(m: ValidatedModel) -> SpectralReport:
    z = zero_analysis(m)
    s_m = sigma_M(m)
    s_l = sigma_L(m)
    sigma = union(s_m, s_l)

    circles: list[tuple[ExactRadius, ExactRadius]] = []
    disks: list[tuple[ExactRadius, ExactRadius]] = []
    prime_circles: list[tuple[ExactRadius, ExactRadius]] = []
    for cid in m.n_cycle_ids():
        g = m.cycle(cid).gm()
        circles.append((g, g))
        prime_circles.append((g, g))
        if any(r.multiplicity == OMEGA for r in m.rays_into(cid)):
            disks.append((ExactRadius.zero(), g))
    for cid in m.l_ray_incident_ids():
        g = m.cycle(cid).gm()
        circles.append((g, g))
        prime_circles.append((g, g))
    origin = [RationalComplex.of(0)]
    s2 = canonicalize(annuli=circles + disks,
                      points=origin if not z.upper else [])
    s2p = canonicalize(annuli=prime_circles,
                       points=origin if not z.lower else [])
    s1 = intersect(s2, s2p)
    s3 = union(s2, s2p)

    radii = critical_radii(m)
    strata: list[StratumRow] = []
    s4_extra: list[tuple[ExactRadius, ExactRadius]] = []
    for lo, hi in zip(radii, radii[1:] + [None]):
        q = rational_between(lo, hi)
        fd = fredholm_data(m, QPoint.of(q))
        strata.append(StratumRow(lo, hi, q, fd))
        if fd.index not in (None, 0) and hi is not None:
            s4_extra.append((lo, hi))
    s4 = union(s3, canonicalize(annuli=s4_extra, points=origin))

    gaps = complement_components(s1)
    removed = []
    for gap in gaps:
        if gap.hi is None:
            removed.append(gap)
            continue
        lo = gap.lo if gap.lo is not None else ExactRadius.zero()
        covered = any(alo <= lo and gap.hi <= ahi for alo, ahi in sigma.annuli)
        if not covered:
            removed.append(gap)
    # points of sigma_1 puncture the complement components rather than
    # belonging to them, so Browder removal can never strip them
    s5 = union(remove_open_gap_traces(sigma, removed), s1)
    z.in_sigma5 = s5.member(QPoint.of(0))

    incident = all(m.incident_rays(cid) for cid in m.cycles)
    report = SpectralReport(
        model=m.name,
        sigma=sigma, sigma_m=s_m, sigma_l=s_l,
        sigma_1=s1, sigma_2=s2, sigma_2_prime=s2p, sigma_3=s3,
        sigma_4=s4, sigma_5=s5,
        rotation_invariant=incident,
        all_cycles_ray_incident=incident,
        sigma5_equals_sigma=(s5 == sigma),
        sigma3_equals_sigma=(s3 == sigma),
        zero=z,
        critical_radii=radii,
        strata=strata,
    )
    return report


# ---------------------------------------------------------------------------
# verification grid


def sample_grid(m: ValidatedModel) -> list[SpectralPoint]:
    """One rational sample per radial stratum, two angles per critical
    circle, every root-set point, plus the origin."""
    second = RationalComplex.of(Fraction(3, 5), Fraction(4, 5))
    pts: list[SpectralPoint] = [QPoint.of(0)]
    radii = critical_radii(m)
    for lo, hi in zip(radii, radii[1:] + [None]):
        pts.append(QPoint.of(rational_between(lo, hi)))
    for r in radii:
        if r.is_zero:
            continue
        q = r.rational_value()
        if q is not None:
            pts.append(QPoint.of(q))
            pts.append(QPoint(RationalComplex.of(q) * second))
        else:
            pts.append(CirclePoint(r, RationalComplex.of(1)))
            pts.append(CirclePoint(r, second))
    for cyc in m.cycles.values():
        w = cyc.weight_product()
        if not w.is_zero:
            for j in range(cyc.period):
                pts.append(RootPoint(w, cyc.period, j))
    return pts


def self_check(m: ValidatedModel, report: SpectralReport | None = None) -> list[str]:
    """Engine-versus-oracle grid plus the structural identities.

    Returns a list of human-readable discrepancies (empty means verified).
    """
    if report is None:
        report = essential_spectra(m)
    msgs: list[str] = []

    def expect(cond: bool, msg: str):
        if not cond:
            msgs.append(msg)

    s1, s2, s2p = report.sigma_1, report.sigma_2, report.sigma_2_prime
    s3, s4, s5 = report.sigma_3, report.sigma_4, report.sigma_5
    sigma = report.sigma
    expect(s1 == intersect(s2, s2p), "sigma_1 != sigma_2 ^ sigma_2'")
    expect(s3 == union(s2, s2p), "sigma_3 != sigma_2 u sigma_2'")
    expect(s1.issubset(s2), "sigma_1 not within sigma_2")
    expect(s2.issubset(s4), "sigma_2 not within sigma_4")
    expect(s1.issubset(s3), "sigma_1 not within sigma_3")
    expect(s3.issubset(s4), "sigma_3 not within sigma_4")
    expect(s4.issubset(s5), "sigma_4 not within sigma_5")
    expect(s5.issubset(sigma), "sigma_5 not within sigma")
    expect(sigma == union(report.sigma_m, report.sigma_l),
           "sigma != sigma_M u sigma_L")
    radii = [s.max_radius() for s in (s1, s2, s2p, s3, s4, s5)]
    expect(all(r == radii[0] for r in radii[1:]),
           "essential radii of sigma_1..sigma_5 differ")
    expect(report.zero.in_sigma5, "0 not in sigma_5")
    if report.all_cycles_ray_incident:
        for name, s in report.named_sets():
            expect(s.is_rotation_invariant(),
                   f"{name} not rotation invariant despite ray-incident cycles")
        expect(report.sigma5_equals_sigma,
               "no isolated cycles but sigma_5 != sigma")

    l_annuli = report.sigma_l.annuli
    crit = set()
    for cyc in m.cycles.values():
        crit.add(cyc.gm())

    for lam in sample_grid(m):
        fd = fredholm_data(m, lam)
        ker = chain_kernel_dim(m, lam)
        dfc = chain_defect_dim(m, lam)
        tag = f"lam={lam}"
        expect(fd.dim_ker == ker,
               f"{tag}: engine dim_ker {fmt_dim(fd.dim_ker)} != chain {fmt_dim(ker)}")
        expect(fd.defect == dfc,
               f"{tag}: engine defect {fmt_dim(fd.defect)} != chain {fmt_dim(dfc)}")
        expect(s2.member(lam) == (not fd.upper),
               f"{tag}: sigma_2 membership vs upper flag")
        expect(s2p.member(lam) == (not fd.lower),
               f"{tag}: sigma_2' membership vs lower flag")
        in_sigma = sigma.member(lam)
        if not in_sigma:
            expect(fd.upper and fd.lower and ker == 0 and dfc == 0
                   and fd.index == 0,
                   f"{tag}: outside sigma but not a clean resolvent point")
        if fd.upper and fd.lower:
            ker_l = chain_kernel_dim(m, lam, l_only=True)
            def_l = chain_defect_dim(m, lam, l_only=True)
            heads = _heads_above(m, lam) if not lam.is_zero else None
            if not lam.is_zero:
                expect(ker == _dim_add(ker_l, heads),
                       f"{tag}: kernel decomposition failed")
                if not (is_infinite(ker_l) or is_infinite(def_l)
                        or is_infinite(heads)):
                    expect(fd.index == (ker_l - def_l) + heads,
                           f"{tag}: index decomposition failed")
            expect(s4.member(lam) == (s3.member(lam) or fd.index != 0),
                   f"{tag}: sigma_4 membership vs index")
        mod = lam.modulus()
        interior = any(lo < mod < hi for lo, hi in l_annuli)
        if interior and mod not in crit and not lam.is_zero:
            ker_l = chain_kernel_dim(m, lam, l_only=True)
            def_l = chain_defect_dim(m, lam, l_only=True)
            expect(_dim_add(ker_l, def_l) != 0,
                   f"{tag}: interior of sigma_L annulus without eigen-chain")
    return msgs
