"""Engine-independent verification.

The exact *chain solvers* compute kernel and defect dimensions straight from
the defining equations, with no reference to the classification engine:

* kernel: w(k) f(phi k) = lam f(k), f continuous.  Along a ray the equation
  is a first-order recurrence; continuity at the anchor cycle decides which
  tail solutions survive.  Eigenvector scales on simultaneously resonant
  cycles joined by two-sided rays satisfy two-variable binomial relations,
  so consistency reduces to loop products over the incidence graph, decided
  exactly.
* defect: the dual acts on summable atom chains by a_{phi k} = a_k w(k)/lam
  with atoms annihilated at ray heads; only summability constrains chains,
  so structures count independently.

The numerical *certificates* instantiate explicit almost-eigenvectors on a
finite truncation (windowed geometric bumps along a locked ray tail) and
Neumann-series resolvent bounds.  Truncations are used only to evaluate
certificates, never to discover spectral regions: finite sections of shifts
pollute (a truncated one-sided shift is nilpotent), while the chain solvers
above are exact.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field

from .exact import (INF, QPoint, RationalComplex, SpectralPoint,
                    is_infinite)
from .model import OMEGA, Ray, ValidatedModel

RC1 = RationalComplex.of(1)


class NoEligibleOrbit(Exception):
    """The engine's membership claim has no certifiable witness orbit."""


class MarginNotReached(Exception):
    """No resolvent margin established within the horizon."""


# ---------------------------------------------------------------------------
# monomials z * lam**e over the coefficient field Q(i)(lam)


Mono = tuple  # (RationalComplex, int)


def _mono_mul(a: Mono, b: Mono) -> Mono:
    return (a[0] * b[0], a[1] + b[1])


def _mono_div(a: Mono, b: Mono) -> Mono:
    return (a[0] / b[0], a[1] - b[1])


def _mono_eq(lam: SpectralPoint, a: Mono, b: Mono) -> bool:
    if a[0].is_zero or b[0].is_zero:
        return a[0].is_zero and b[0].is_zero
    return lam.pow_equals(a[1] - b[1], b[0] / a[0])


def _active(m: ValidatedModel, lam: SpectralPoint, cid: str) -> bool:
    """Whether lam**p equals the cycle weight product (cycle resonance)."""
    cyc = m.cycle(cid)
    w = cyc.weight_product()
    if w.is_zero:
        return False
    return lam.pow_equals(cyc.period, w)


def _pattern(m: ValidatedModel, cid: str) -> list[Mono]:
    """Eigenvector shape on a resonant cycle, normalized to 1 at phase 0:
    pat[j+1] = lam * pat[j] / w_j."""
    cyc = m.cycle(cid)
    pat = [(RC1, 0)]
    for j in range(cyc.period - 1):
        z, e = pat[-1]
        pat.append((z / cyc.weights[j], e + 1))
    return pat


def _transport_ratio(m: ValidatedModel, lam: SpectralPoint, ray: Ray) -> Mono:
    """For a two-sided ray joining two resonant cycles: the monomial rho with
    t_alpha == rho * t_omega, obtained by carrying the forced omega-tail
    values down through the exceptional window."""
    lock_neg, lock_pos = m.lock_bounds(ray)
    a_cyc = m.cycle(ray.omega.cycle)
    b_cyc = m.cycle(ray.alpha.cycle)
    pat_a = _pattern(m, ray.omega.cycle)
    pat_b = _pattern(m, ray.alpha.cycle)
    val = pat_a[(ray.omega.phase + lock_pos) % a_cyc.period]
    for i in range(lock_pos - 1, lock_neg - 1, -1):
        v = m.ray_weight(ray, i)
        val = (val[0] * v, val[1] - 1)  # f(k_i) = v_i f(k_{i+1}) / lam
    pi = pat_b[(ray.alpha.phase + lock_neg) % b_cyc.period]
    return _mono_div(val, pi)


def _solve_resonant_graph(lam, actives, killed, edges) -> int:
    """Free dimensions among resonant cycle scales under binomial links.

    edges: (a, b, rho) meaning t_b == rho * t_a.  Each consistent component
    without a killed node contributes one dimension; an inconsistent loop or
    a killed node collapses its whole component.
    """
    adj = defaultdict(list)
    for a, b, rho in edges:
        adj[a].append((b, rho))
        adj[b].append((a, (RC1 / rho[0], -rho[1])))
    seen: set = set()
    dims = 0
    for node in actives:
        if node in seen:
            continue
        rel = {node: (RC1, 0)}
        queue = [node]
        ok = True
        while queue:
            x = queue.pop()
            for y, rho in adj[x]:
                cand = _mono_mul(rel[x], rho)
                if y in rel:
                    if not _mono_eq(lam, rel[y], cand):
                        ok = False
                else:
                    rel[y] = cand
                    queue.append(y)
        seen.update(rel)
        if ok and not any(c in killed for c in rel):
            dims += 1
    return dims


# ---------------------------------------------------------------------------
# chain solvers


def chain_kernel_dim(m: ValidatedModel, lam: SpectralPoint, l_only: bool = False):
    """dim ker(lam I - T), restricted to the eventual image when l_only."""
    if lam.is_zero:
        return _kernel_dim_at_zero(m, l_only)
    mod = lam.modulus()
    total = 0
    infinite = False
    if not l_only:
        for ray in m.forward_rays():
            if mod < m.cycle(ray.omega.cycle).gm():
                if ray.multiplicity == OMEGA:
                    infinite = True
                else:
                    total += ray.multiplicity
    actives = {cid for cid in m.cycles if _active(m, lam, cid)}
    killed: set = set()
    edges = []
    for ray in m.two_sided_rays():
        g_w = m.cycle(ray.omega.cycle).gm()
        g_a = m.cycle(ray.alpha.cycle).gm()
        w_act = ray.omega.cycle in actives
        a_act = ray.alpha.cycle in actives
        if m.ray_has_zero(ray):
            # the chain is cut at the last zero: everything below it vanishes
            if mod < g_w:
                total += 1
            if a_act:
                killed.add(ray.alpha.cycle)
        elif not w_act and not a_act:
            if g_a < mod < g_w:
                total += 1
        elif w_act and not a_act:
            if not g_a < mod:
                killed.add(ray.omega.cycle)
        elif a_act and not w_act:
            if not mod < g_w:
                killed.add(ray.alpha.cycle)
        else:
            edges.append((ray.omega.cycle, ray.alpha.cycle,
                          _transport_ratio(m, lam, ray)))
    total += _solve_resonant_graph(lam, actives, killed, edges)
    return INF if infinite else total


def _kernel_dim_at_zero(m: ValidatedModel, l_only: bool):
    # ker T = continuous functions vanishing on phi({w != 0}); the free spots
    # are the heads plus the images of the zeros of w
    total = 0
    infinite = False
    if not l_only:
        h = m.heads_count()
        if is_infinite(h):
            infinite = True
        else:
            total += h
    for cid, cyc in m.cycles.items():
        incident = [r for r in m.incident_rays(cid)
                    if not (l_only and r.is_forward)]
        for w in cyc.weights:
            if w.is_zero:
                if incident:
                    infinite = True  # the zero repeats along locked rays
                else:
                    total += 1
    for ray in m.raw.rays:
        if l_only and ray.is_forward:
            continue
        total += sum(1 for _, v in ray.exceptional if v.is_zero)
    return INF if infinite else total


def chain_defect_dim(m: ValidatedModel, lam: SpectralPoint, l_only: bool = False):
    """dim ker(lam I - T') over summable atom chains (= codim of the closed
    range).  Forward rays never contribute: their head atom is annihilated
    and the chain propagates forward only."""
    if lam.is_zero:
        return _defect_dim_at_zero(m, l_only)
    mod = lam.modulus()
    total = sum(1 for cid in m.cycles if _active(m, lam, cid))
    for ray in m.two_sided_rays():
        g_w = m.cycle(ray.omega.cycle).gm()
        g_a = m.cycle(ray.alpha.cycle).gm()
        if m.ray_has_zero(ray):
            if mod < g_a:
                total += 1
        elif g_w < mod < g_a:
            total += 1
    return total


def _defect_dim_at_zero(m: ValidatedModel, l_only: bool):
    # ker T' = atoms supported on the zero set of w
    total = 0
    infinite = False
    for cid, cyc in m.cycles.items():
        incident = [r for r in m.incident_rays(cid)
                    if not (l_only and r.is_forward)]
        zeros = sum(1 for w in cyc.weights if w.is_zero)
        if zeros and incident:
            infinite = True
        total += zeros
    for ray in m.raw.rays:
        if l_only and ray.is_forward:
            continue
        total += sum(1 for _, v in ray.exceptional if v.is_zero)
    return INF if infinite else total


# ---------------------------------------------------------------------------
# truncations


@dataclass
class Truncation:
    """Finite enumeration of K with the sparse action of the operator and of
    its dual on point masses; entries are exact, evaluated on demand."""

    model: ValidatedModel
    horizon: int

    def points(self):
        m, n = self.model, self.horizon
        for cid, cyc in m.cycles.items():
            for ph in range(cyc.period):
                yield ("cycle", cid, ph)
        for ray in m.raw.rays:
            if ray.is_forward:
                copies = (n + 1 if ray.multiplicity == OMEGA
                          else min(ray.multiplicity, n + 1))
                for c in range(copies):
                    for i in range(n + 1):
                        yield ("ray", ray.id, c, i)
            else:
                for i in range(-n, n + 1):
                    yield ("ray", ray.id, 0, i)

    def bidual_action(self, ref):
        """T'' on the point mass at ref: (target point, weight) or None."""
        pre = self.model.phi_inv(ref)
        if pre is None:
            return None
        return pre, self.model.weight_at(pre)

    def dual_action(self, ref):
        """T' on the Dirac mass at ref: (target point, weight)."""
        return self.model.phi(ref), self.model.weight_at(ref)


# ---------------------------------------------------------------------------
# certificates


@dataclass
class Certificate:
    kind: str  # IN_upper | IN_lower | OUT_neumann | CHAIN_DIMS
    lam: str
    horizon: int
    passed: bool
    residual_ratio: float | None = None
    margin: float | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lambda": self.lam,
            "horizon": self.horizon,
            "residual_ratio": self.residual_ratio,
            "margin": self.margin,
            "pass": self.passed,
            "details": self.details,
        }


def _pass_threshold(n: int, eps: float) -> float:
    return max(5.0 / math.sqrt(n), eps)


def _window_weights(m: ValidatedModel, ray: Ray, copy: int, lo: int, hi: int):
    return {i: m.ray_weight(ray, i, copy).to_complex() for i in range(lo, hi + 1)}


def _upper_window_certificate(m, lam, ray, copy, base, n, eps) -> Certificate:
    """Eq-style windowed bump along phi-preimages of a deep tail point."""
    lamc = lam.to_complex()
    s = 1.0 / math.sqrt(n)
    w = _window_weights(m, ray, copy, base - 2 * n - 1, base)
    coeff = {}
    u = 1.0 + 0.0j  # lam**(-i) * w_i(k_{base-i}), maintained incrementally
    for i in range(0, 2 * n + 1):
        if i > 0:
            u = u * w[base - i] / lamc
        coeff[base - i] = (1.0 - s) ** abs(i - n) * u
    norm = max(abs(c) for c in coeff.values())
    resid = 0.0
    for j in range(base - 2 * n - 1, base + 1):
        tv = w[j] * coeff.get(j + 1, 0.0) - lamc * coeff.get(j, 0.0)
        resid = max(resid, abs(tv))
    ratio = resid / norm
    return Certificate("IN_upper", str(lam), n, ratio <= _pass_threshold(n, eps),
                       residual_ratio=ratio,
                       details={"ray": ray.id, "base_index": base})


def _lower_window_certificate(m, lam, ray, copy, base, n, eps) -> Certificate:
    """Dual windowed bump pushed forward along the ray."""
    lamc = lam.to_complex()
    s = 1.0 / math.sqrt(n)
    w = _window_weights(m, ray, copy, base, base + 2 * n + 1)
    coeff = {}
    u = 1.0 + 0.0j  # lam**(-i) * w_i(k_base)
    for i in range(0, 2 * n + 1):
        if i > 0:
            u = u * w[base + i - 1] / lamc
        coeff[base + i] = (1.0 - s) ** abs(i - n) * u
    norm = sum(abs(c) for c in coeff.values())
    resid = 0.0
    for j in range(base, base + 2 * n + 2):
        tv = w[j - 1] * coeff.get(j - 1, 0.0) if j - 1 in coeff else 0.0
        tv -= lamc * coeff.get(j, 0.0)
        resid += abs(tv)
    ratio = resid / norm
    return Certificate("IN_lower", str(lam), n, ratio <= _pass_threshold(n, eps),
                       residual_ratio=ratio,
                       details={"ray": ray.id, "base_index": base})


def _eigenvector_certificate(m, lam, ray, copy, n, eps, kind) -> Certificate:
    """Exact decaying eigenvector on a ray copy in the |lam| < gm regime,
    truncated at the horizon; the only residual is the cut."""
    lamc = lam.to_complex()
    coeff = {0: 1.0 + 0.0j}
    for i in range(n):
        v = m.ray_weight(ray, i, copy).to_complex()
        coeff[i + 1] = lamc * coeff[i] / v
    norm = max(abs(c) for c in coeff.values())
    resid = 0.0
    for j in range(0, n + 1):
        v = m.ray_weight(ray, j, copy).to_complex()
        tv = v * coeff.get(j + 1, 0.0) - lamc * coeff[j]
        resid = max(resid, abs(tv))
    ratio = resid / norm
    return Certificate(kind, str(lam), n, ratio <= _pass_threshold(n, eps),
                       residual_ratio=ratio,
                       details={"ray": ray.id, "exact_eigenvector": True})


def _zero_certificate(m, lam, side, n, eps) -> Certificate:
    """lam == 0 witnesses: head masses (upper) are killed by T'' exactly;
    Dirac masses at zeros of w (lower) are killed by T' exactly."""
    kind = "IN_upper" if side == "upper" else "IN_lower"
    if side == "upper":
        for ray in m.forward_rays():
            if ray.multiplicity == OMEGA:
                return Certificate(kind, "0", n, True, residual_ratio=0.0,
                                   details={"witness": f"heads of {ray.id}"})
    for cid, cyc in m.cycles.items():
        if cyc.has_zero_weight and m.incident_rays(cid):
            return Certificate(kind, "0", n, True, residual_ratio=0.0,
                               details={"witness": f"recurrent zeros near {cid}"})
    raise NoEligibleOrbit("no singular witness for lam == 0")


def in_certificate(m: ValidatedModel, lam: SpectralPoint, side: str,
                   horizon: int = 10_000, eps: float = 1e-6) -> Certificate:
    """Certify the engine's claim lam in sigma_2 (upper) / sigma_2' (lower)."""
    if horizon < 4:
        raise ValueError("horizon must be at least 4")
    n = horizon
    if lam.is_zero:
        return _zero_certificate(m, lam, side, n, eps)
    r = lam.modulus()
    # circle witnesses: a locked ray tail at a cycle of matching radius
    for cid, cyc in m.cycles.items():
        if cyc.gm() != r:
            continue
        for ray in m.rays_into(cid):
            # windows sit past the lock index, where every copy is locked
            _, lock_pos = m.lock_bounds(ray)
            if side == "upper":
                return _upper_window_certificate(m, lam, ray, 0,
                                                 lock_pos + 2 * n + 1, n, eps)
            return _lower_window_certificate(m, lam, ray, 0, lock_pos, n, eps)
        for ray in m.incident_rays(cid):
            if not ray.is_two_sided:
                continue
            lock_neg, lock_pos = m.lock_bounds(ray)
            on_omega = ray.omega.cycle == cid
            if side == "upper":
                base = lock_pos + 2 * n + 1 if on_omega else lock_neg
                return _upper_window_certificate(m, lam, ray, 0, base, n, eps)
            base = lock_pos if on_omega else lock_neg - 2 * n - 1
            return _lower_window_certificate(m, lam, ray, 0, base, n, eps)
    if side == "upper":
        # disk interior: per-copy exact eigenvectors under a countable bundle
        for ray in m.forward_rays():
            if ray.multiplicity == OMEGA and r < m.cycle(ray.omega.cycle).gm():
                copy = 1 if ray.exceptional else 0
                return _eigenvector_certificate(m, lam, ray, copy, n, eps,
                                                "IN_upper")
    raise NoEligibleOrbit(f"no witness orbit for lam = {lam} ({side})")


# ---------------------------------------------------------------------------
# resolvent certificates


def _components(m: ValidatedModel):
    parent = {cid: cid for cid in m.cycles}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in m.two_sided_rays():
        a, b = find(r.alpha.cycle), find(r.omega.cycle)
        if a != b:
            parent[a] = b
    comps = defaultdict(lambda: {"cycles": [], "rays": []})
    for cid in m.cycles:
        comps[find(cid)]["cycles"].append(cid)
    for r in m.raw.rays:
        comps[find(r.omega.cycle)]["rays"].append(r)
    return list(comps.values())


def _ray_stream_bounds(m, ray, nn):
    lock_neg, lock_pos = m.lock_bounds(ray)
    if ray.is_forward:
        p = m.cycle(ray.omega.cycle).period
        return 0, lock_pos + p
    pa = m.cycle(ray.alpha.cycle).period
    pw = m.cycle(ray.omega.cycle).period
    return lock_neg - nn - pa, lock_pos + pw


def _extreme_abs2_wn(m, comp, nn, want_max: bool, l_only: bool):
    """Exact max (or min) of |w_nn|**2 over the points of a component."""
    best = None

    def consider(val):
        nonlocal best
        if best is None or (val > best if want_max else val < best):
            best = val

    for cid in comp["cycles"]:
        cyc = m.cycle(cid)
        for ph in range(cyc.period):
            prod = RC1
            for t in range(nn):
                prod = prod * cyc.weights[(ph + t) % cyc.period]
            consider(prod.abs2())
    for ray in comp["rays"]:
        if l_only and ray.is_forward:
            continue
        lo, hi = _ray_stream_bounds(m, ray, nn)
        for start in range(lo, hi + 1):
            prod = RC1
            for t in range(nn):
                prod = prod * m.ray_weight(ray, start + t)
            consider(prod.abs2())
    return best


def out_certificate(m: ValidatedModel, lam: SpectralPoint,
                    horizon: int = 200) -> Certificate:
    """Certify lam outside the spectrum, component by component.

    Per component, one of three rigorous routes must apply within the
    horizon: a Neumann bound sup|w_n|^(1/n) < |lam| above the component, the
    inverse-regime bound |lam|^n < inf |w_n| on the eventual image below it
    (plus exact kernel vanishing), or exact root separation on a bare cycle.
    """
    if lam.is_zero:
        raise MarginNotReached("0 always belongs to the spectrum")
    mod = lam.modulus()
    lam_abs2 = mod.sq if mod.p == 1 else None
    if lam_abs2 is None:
        raise MarginNotReached("resolvent certificates need |lam|^2 rational")
    details = {}
    worst = 0.0
    for ci, comp in enumerate(_components(m)):
        gms = [m.cycle(cid).gm() for cid in comp["cycles"]]
        gmax = max(gms)
        gmin = min(gms)
        label = "+".join(sorted(comp["cycles"]))
        entry = None
        if mod > gmax:
            nn = 1
            while nn <= horizon:
                sup = _extreme_abs2_wn(m, comp, nn, want_max=True, l_only=False)
                if sup < lam_abs2**nn:
                    margin = (float(sup) / float(lam_abs2) ** nn) ** (0.5 / nn)
                    entry = {"route": "neumann", "n": nn, "margin": margin}
                    break
                nn *= 2
        elif mod < gmin:
            invertible = (not any(m.cycle(cid).has_zero_weight
                                  for cid in comp["cycles"])
                          and not any(m.ray_has_zero(r) for r in comp["rays"]
                                      if r.is_two_sided))
            sub = _submodel(m, comp)
            if invertible and chain_kernel_dim(sub, lam) == 0:
                nn = 1
                while nn <= horizon:
                    inf_l = _extreme_abs2_wn(m, comp, nn, want_max=False,
                                             l_only=True)
                    if lam_abs2**nn < inf_l:
                        margin = (float(lam_abs2) ** nn / float(inf_l)) ** (0.5 / nn)
                        entry = {"route": "inverse", "n": nn, "margin": margin,
                                 "kernel_checked": True}
                        break
                    nn *= 2
        elif not comp["rays"] and len(comp["cycles"]) == 1:
            cid = comp["cycles"][0]
            cyc = m.cycle(cid)
            w = cyc.weight_product()
            if isinstance(lam, QPoint) and not lam.pow_equals(cyc.period, w):
                # exact separation from the finite root set; the margin is
                # informational (pass is decided by the exact test above)
                lp = lam.z**cyc.period
                sep2 = (lp - w).abs2()
                rel = float(sep2 / (lp.abs2() + w.abs2() + sep2)) ** 0.5
                entry = {"route": "root_separation", "n": cyc.period,
                         "margin": 1.0 - max(rel, 1e-12)}
        if entry is None:
            raise MarginNotReached(
                f"component {label}: no certificate route reached a margin "
                f"within horizon {horizon}")
        details[label] = entry
        worst = max(worst, entry["margin"])
    return Certificate("OUT_neumann", str(lam), horizon, True, margin=worst,
                       details=details)


def _submodel(m: ValidatedModel, comp) -> ValidatedModel:
    from .model import OrbitModel
    cycles = tuple(m.cycle(cid) for cid in sorted(comp["cycles"]))
    rays = tuple(sorted(comp["rays"], key=lambda r: r.id))
    return ValidatedModel(OrbitModel(m.name + "/component", cycles, rays))
