"""Finitely presented compact systems (K, phi, w).

A model is a finite list of weighted cycles plus rays:

* a *forward ray* is an orbit k0, k1, ... entering a cycle: the points
  spiral onto the anchor cycle and the weights eventually phase-lock to the
  cycle weights.  Its head k0 is a point of K without a preimage, so any
  valid model presents a strictly non-surjective phi.  A ray may carry a
  finite multiplicity (parallel copies) or multiplicity omega, in which case
  countably many copies accumulate onto the anchor point and K stays compact.
* a *two-sided ray* is a bi-infinite orbit phase-locking to an (alpha) cycle
  in the past and an (omega) cycle in the future.  Its points have preimages
  of every order, so they belong to the eventual image.

Weights are Gaussian rationals; finitely many per ray may be overridden
("exceptional" values).  Overrides apply to copy 0 of a bundle only, which
keeps the weight function continuous at the accumulation point.

The derived topology is simple enough to be computed exactly:

* eventual image  L = cycles + two-sided rays,
* its interior in K consists of the two-sided ray points (always isolated)
  and the cycles without incident forward rays or bundles,
* boundary cycles N = cycles carrying at least one forward ray or bundle,
* transient part M = K minus interior(L) = forward-ray points + N,
  which splits into clopen clusters, one per boundary cycle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .exact import INF, ExactRadius, RationalComplex

OMEGA = INF  # multiplicity marker for countable bundles


class ModelError(Exception):
    """Base class for model construction/validation failures."""

    code = "ModelError"


class MalformedWeight(ModelError):
    code = "MalformedWeight"


class DuplicateId(ModelError):
    code = "DuplicateId"


class DanglingAnchor(ModelError):
    code = "DanglingAnchor"


class MissingForwardRay(ModelError):
    code = "MissingForwardRay"


class SchemaError(ModelError):
    code = "SchemaError"


class UnresolvablePoint(ModelError):
    code = "UnresolvablePoint"


class EmptyPart(ModelError):
    code = "EmptyPart"


@dataclass(frozen=True)
class Cycle:
    id: str
    weights: tuple[RationalComplex, ...]

    @property
    def period(self) -> int:
        return len(self.weights)

    def weight_product(self) -> RationalComplex:
        out = RationalComplex.of(1)
        for w in self.weights:
            out = out * w
        return out

    def gm(self) -> ExactRadius:
        """Geometric mean of the weight moduli: |W|**(1/p)."""
        return ExactRadius(self.weight_product().abs2(), self.period)

    @property
    def has_zero_weight(self) -> bool:
        return any(w.is_zero for w in self.weights)


@dataclass(frozen=True)
class Anchor:
    cycle: str
    phase: int


@dataclass(frozen=True)
class Ray:
    id: str
    kind: str  # "forward" | "two_sided"
    multiplicity: object  # positive int, or OMEGA
    omega: Anchor
    alpha: Anchor | None = None
    exceptional: tuple[tuple[int, RationalComplex], ...] = ()

    @property
    def is_forward(self) -> bool:
        return self.kind == "forward"

    @property
    def is_two_sided(self) -> bool:
        return self.kind == "two_sided"


@dataclass(frozen=True)
class OrbitModel:
    name: str
    cycles: tuple[Cycle, ...]
    rays: tuple[Ray, ...]


# point references: ("cycle", cycle_id, phase) | ("ray", ray_id, copy, index)
PointRef = tuple


class ValidatedModel:
    """An OrbitModel with all invariants checked and lookups prepared."""

    def __init__(self, raw: OrbitModel):
        self.raw = raw
        self.name = raw.name
        self.cycles = {c.id: c for c in raw.cycles}
        self.rays = {r.id: r for r in raw.rays}
        self._omega_incident: dict[str, list[Ray]] = {c: [] for c in self.cycles}
        self._alpha_incident: dict[str, list[Ray]] = {c: [] for c in self.cycles}
        for r in raw.rays:
            self._omega_incident[r.omega.cycle].append(r)
            if r.alpha is not None:
                self._alpha_incident[r.alpha.cycle].append(r)

    # --- structure queries -------------------------------------------------

    def cycle(self, cid: str) -> Cycle:
        return self.cycles[cid]

    def forward_rays(self) -> list[Ray]:
        return [r for r in self.raw.rays if r.is_forward]

    def two_sided_rays(self) -> list[Ray]:
        return [r for r in self.raw.rays if r.is_two_sided]

    def rays_into(self, cid: str) -> list[Ray]:
        """Forward rays and bundles whose omega anchor is the given cycle."""
        return [r for r in self._omega_incident[cid] if r.is_forward]

    def incident_rays(self, cid: str) -> list[Ray]:
        two = [r for r in self._omega_incident[cid] if r.is_two_sided]
        two += [r for r in self._alpha_incident[cid] if r.is_two_sided]
        return self.rays_into(cid) + two

    def n_cycle_ids(self) -> list[str]:
        return [cid for cid in self.cycles if self.rays_into(cid)]

    def l_ray_incident_ids(self) -> list[str]:
        out = []
        for cid in self.cycles:
            two = [r for r in self._omega_incident[cid] if r.is_two_sided]
            two += [r for r in self._alpha_incident[cid] if r.is_two_sided]
            if two:
                out.append(cid)
        return out

    def isolated_cycle_ids(self) -> list[str]:
        return [cid for cid in self.cycles if not self.incident_rays(cid)]

    def l_components(self) -> list[dict]:
        """Weakly connected components of the graph cycles + two-sided rays."""
        parent = {cid: cid for cid in self.cycles}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for r in self.two_sided_rays():
            a, b = find(r.alpha.cycle), find(r.omega.cycle)
            if a != b:
                parent[a] = b
        comps: dict[str, dict] = {}
        for cid in self.cycles:
            comps.setdefault(find(cid), {"cycles": [], "rays": []})["cycles"].append(cid)
        for r in self.two_sided_rays():
            comps[find(r.omega.cycle)]["rays"].append(r.id)
        return [comps[k] for k in sorted(comps)]

    def heads_count(self):
        total = 0
        for r in self.forward_rays():
            if r.multiplicity == OMEGA:
                return INF
            total += r.multiplicity
        return total

    # --- weights along orbits ----------------------------------------------

    def lock_bounds(self, ray: Ray) -> tuple[int, int]:
        """(lock_neg, lock_pos): weights at index >= lock_pos follow the
        omega cycle, at index <= lock_neg the alpha cycle (two-sided)."""
        idxs = [i for i, _ in ray.exceptional]
        lock_pos = max([i + 1 for i in idxs], default=0)
        if ray.is_forward:
            return (0, max(lock_pos, 0))
        lock_neg = min([i - 1 for i in idxs], default=-1)
        return (min(lock_neg, -1), max(lock_pos, 0))

    def ray_weight(self, ray: Ray, index: int, copy: int = 0) -> RationalComplex:
        """Weight at a ray point.  Exceptional overrides bind copy 0 only."""
        if copy == 0:
            for i, v in ray.exceptional:
                if i == index:
                    return v
        if ray.is_forward or index >= 0:
            c = self.cycle(ray.omega.cycle)
            return c.weights[(ray.omega.phase + index) % c.period]
        c = self.cycle(ray.alpha.cycle)
        return c.weights[(ray.alpha.phase + index) % c.period]

    def ray_has_zero(self, ray: Ray) -> bool:
        """True when some weight on the ray (any copy) vanishes."""
        if any(v.is_zero for _, v in ray.exceptional):
            return True
        if self.cycle(ray.omega.cycle).has_zero_weight:
            return True
        if ray.is_two_sided and self.cycle(ray.alpha.cycle).has_zero_weight:
            return True
        return False

    def resolve_point(self, ref: PointRef):
        if not isinstance(ref, tuple) or not ref:
            raise UnresolvablePoint(f"bad point reference {ref!r}")
        if ref[0] == "cycle":
            _, cid, phase = ref
            if cid not in self.cycles:
                raise UnresolvablePoint(f"unknown cycle {cid!r}")
            if not (0 <= phase < self.cycle(cid).period):
                raise UnresolvablePoint(f"phase {phase} out of range for {cid!r}")
            return ref
        if ref[0] == "ray":
            _, rid, copy, index = ref
            if rid not in self.rays:
                raise UnresolvablePoint(f"unknown ray {rid!r}")
            ray = self.rays[rid]
            mult = ray.multiplicity
            if copy < 0 or (mult != OMEGA and copy >= mult):
                raise UnresolvablePoint(f"copy {copy} out of range for {rid!r}")
            if ray.is_forward and index < 0:
                raise UnresolvablePoint("forward ray index must be nonnegative")
            return ref
        raise UnresolvablePoint(f"bad point kind {ref[0]!r}")

    def weight_at(self, ref: PointRef) -> RationalComplex:
        ref = self.resolve_point(ref)
        if ref[0] == "cycle":
            _, cid, phase = ref
            return self.cycle(cid).weights[phase]
        _, rid, copy, index = ref
        return self.ray_weight(self.rays[rid], index, copy)

    def phi(self, ref: PointRef) -> PointRef:
        ref = self.resolve_point(ref)
        if ref[0] == "cycle":
            _, cid, phase = ref
            return ("cycle", cid, (phase + 1) % self.cycle(cid).period)
        _, rid, copy, index = ref
        return ("ray", rid, copy, index + 1)

    def phi_inv(self, ref: PointRef) -> PointRef | None:
        """Preimage under phi; None exactly at forward-ray heads."""
        ref = self.resolve_point(ref)
        if ref[0] == "cycle":
            _, cid, phase = ref
            return ("cycle", cid, (phase - 1) % self.cycle(cid).period)
        _, rid, copy, index = ref
        ray = self.rays[rid]
        if ray.is_forward and index == 0:
            return None
        return ("ray", rid, copy, index - 1)


def validate(raw: OrbitModel) -> ValidatedModel:
    """Check all model invariants; raise a ModelError subclass on failure."""
    seen = set()
    for obj in list(raw.cycles) + list(raw.rays):
        if obj.id in seen:
            raise DuplicateId(f"duplicate id {obj.id!r}")
        seen.add(obj.id)
    cycle_ids = {c.id for c in raw.cycles}
    for c in raw.cycles:
        if c.period < 1:
            raise MalformedWeight(f"cycle {c.id!r} must have period >= 1")
    for r in raw.rays:
        if r.kind not in ("forward", "two_sided"):
            raise SchemaError(f"ray {r.id!r}: unknown kind {r.kind!r}")
        anchors = [("omega", r.omega)]
        if r.is_two_sided:
            if r.alpha is None:
                raise DanglingAnchor(f"two-sided ray {r.id!r} lacks an alpha anchor")
            if r.multiplicity != 1:
                raise SchemaError(f"two-sided ray {r.id!r} must have multiplicity 1")
            anchors.append(("alpha", r.alpha))
        else:
            if r.alpha is not None:
                raise SchemaError(f"forward ray {r.id!r} cannot carry an alpha anchor")
            if r.multiplicity != OMEGA and (not isinstance(r.multiplicity, int)
                                            or r.multiplicity < 1):
                raise SchemaError(f"ray {r.id!r}: bad multiplicity")
        for side, a in anchors:
            if a.cycle not in cycle_ids:
                raise DanglingAnchor(f"ray {r.id!r} {side}-anchored to unknown "
                                     f"cycle {a.cycle!r}")
            period = next(c.period for c in raw.cycles if c.id == a.cycle)
            if not (0 <= a.phase < period):
                raise DanglingAnchor(f"ray {r.id!r}: {side} phase {a.phase} out of "
                                     f"range for cycle {a.cycle!r}")
        idxs = [i for i, _ in r.exceptional]
        if len(idxs) != len(set(idxs)):
            raise MalformedWeight(f"ray {r.id!r}: duplicate exceptional index")
        if r.is_forward and any(i < 0 for i in idxs):
            raise MalformedWeight(f"ray {r.id!r}: negative exceptional index")
    if not any(r.is_forward for r in raw.rays):
        raise MissingForwardRay(
            "model has no forward ray, so phi would be surjective")
    return ValidatedModel(raw)


# ---------------------------------------------------------------------------
# derived topological data


@dataclass
class ZeroEntry:
    point: PointRef
    isolated: bool


@dataclass
class CoreSets:
    """L / M / N bookkeeping for a validated model."""

    l_components: list[dict]
    n_cycles: list[str]
    m_clusters: list[tuple[str, list[str]]]
    sources_count: object  # int or INF
    sources: list[PointRef] | None  # None when infinite
    z_w: list[ZeroEntry]
    z_w_count: object  # int or INF
    int_l_isolated: list[str]


def core_sets(m: ValidatedModel) -> CoreSets:
    n_ids = m.n_cycle_ids()
    clusters = [(cid, [r.id for r in m.rays_into(cid)]) for cid in n_ids]
    heads = m.heads_count()
    if heads == INF:
        sources = None
    else:
        sources = [("ray", r.id, c, 0)
                   for r in m.forward_rays() for c in range(r.multiplicity)]

    zeros: list[ZeroEntry] = []
    infinite_zeros = False
    for cid, cyc in m.cycles.items():
        incident = bool(m.incident_rays(cid))
        for ph, w in enumerate(cyc.weights):
            if w.is_zero:
                zeros.append(ZeroEntry(("cycle", cid, ph), isolated=not incident))
                if incident:
                    infinite_zeros = True  # locked ray weights repeat the zero
    for r in m.raw.rays:
        for i, v in r.exceptional:
            if v.is_zero:
                zeros.append(ZeroEntry(("ray", r.id, 0, i), isolated=True))
    z_count = INF if infinite_zeros else len(zeros)

    return CoreSets(
        l_components=m.l_components(),
        n_cycles=n_ids,
        m_clusters=clusters,
        sources_count=heads,
        sources=sources,
        z_w=zeros,
        z_w_count=z_count,
        int_l_isolated=m.isolated_cycle_ids(),
    )


# ---------------------------------------------------------------------------
# cocycle products and local spectral radii


def w_n(m: ValidatedModel, ref: PointRef, n: int) -> RationalComplex:
    """Product w(k) w(phi k) ... w(phi^(n-1) k); the empty product is 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = RationalComplex.of(1)
    cur = m.resolve_point(ref)
    for _ in range(n):
        out = out * m.weight_at(cur)
        cur = m.phi(cur)
    return out


def _cluster_gm(m: ValidatedModel, cid: str) -> ExactRadius:
    """Cluster radius from a locked ray window (one full anchor period).

    Equals the anchor-cycle geometric mean; computed from the ray's own
    weight stream so radius checks do not all flow through Cycle.gm().
    """
    rays = m.rays_into(cid)
    if not rays:
        return m.cycle(cid).gm()
    ray = rays[0]
    _, lock_pos = m.lock_bounds(ray)
    p = m.cycle(cid).period
    prod = RationalComplex.of(1)
    for i in range(lock_pos, lock_pos + p):
        prod = prod * m.ray_weight(ray, i)  # past the lock: same for every copy
    return ExactRadius(prod.abs2(), p)


def rho(m: ValidatedModel, part, inverse: bool = False) -> ExactRadius:
    """Spectral radius of the restriction to a part of K.

    part is one of "M", "N", "L", ("cycle", id), ("cluster", id).  With
    inverse=True returns the reciprocal bound min gm (the 1/rho(T^-1) radius
    used for the invertible-part tests); caller checks invertibility.
    """
    if part == "M" or part == "N":
        ids = m.n_cycle_ids()
        if not ids:
            raise EmptyPart("no boundary cycles")
        gms = ([_cluster_gm(m, cid) for cid in ids] if part == "M"
               else [m.cycle(cid).gm() for cid in ids])
    elif part == "L":
        ids = list(m.cycles)
        if not ids:
            raise EmptyPart("model has no cycles")
        gms = [m.cycle(cid).gm() for cid in ids]
    elif isinstance(part, tuple) and part[0] == "cycle":
        if part[1] not in m.cycles:
            raise EmptyPart(f"unknown cycle {part[1]!r}")
        gms = [m.cycle(part[1]).gm()]
    elif isinstance(part, tuple) and part[0] == "cluster":
        if part[1] not in m.n_cycle_ids():
            raise EmptyPart(f"cycle {part[1]!r} heads no cluster")
        gms = [_cluster_gm(m, part[1])]
    else:
        raise EmptyPart(f"unknown part {part!r}")
    out = gms[0]
    for g in gms[1:]:
        if (g < out) if inverse else (g > out):
            out = g
    return out


# ---------------------------------------------------------------------------
# strict JSON model files


def _require_keys(obj: dict, allowed: set, required: set, where: str):
    for k in obj:
        if k not in allowed:
            raise SchemaError(f"{where}: unknown key {k!r}")
    for k in required:
        if k not in obj:
            raise SchemaError(f"{where}: missing key {k!r}")


def _strict_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _parse_weight(parts, where: str) -> RationalComplex:
    if (not isinstance(parts, list) or len(parts) != 4
            or not all(_strict_int(x) for x in parts)):
        raise MalformedWeight(f"{where}: weight must be [reNum,reDen,imNum,imDen]")
    try:
        return RationalComplex.from_list(parts)
    except ZeroDivisionError as e:
        raise MalformedWeight(f"{where}: {e}") from e


def parse_model_json(text: str) -> ValidatedModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    _require_keys(doc, {"name", "cycles", "rays"}, {"name", "cycles", "rays"},
                  "top level")
    cycles = []
    for i, c in enumerate(doc["cycles"]):
        where = f"cycles[{i}]"
        _require_keys(c, {"id", "weights"}, {"id", "weights"}, where)
        if not isinstance(c["weights"], list) or not c["weights"]:
            raise MalformedWeight(f"{where}: weights must be a nonempty list")
        cycles.append(Cycle(
            id=str(c["id"]),
            weights=tuple(_parse_weight(w, where) for w in c["weights"]),
        ))
    rays = []
    for i, r in enumerate(doc["rays"]):
        where = f"rays[{i}]"
        _require_keys(r, {"id", "kind", "multiplicity", "omega", "alpha",
                          "exceptional"},
                      {"id", "kind", "multiplicity", "omega"}, where)
        mult = r["multiplicity"]
        if mult == "omega":
            mult = OMEGA
        elif not _strict_int(mult):
            raise SchemaError(f"{where}: multiplicity must be an int or \"omega\"")

        def anchor(obj, side):
            _require_keys(obj, {"cycle", "phase"}, {"cycle", "phase"},
                          f"{where}.{side}")
            if not _strict_int(obj["phase"]):
                raise SchemaError(f"{where}.{side}: phase must be an int")
            return Anchor(str(obj["cycle"]), obj["phase"])

        exc = []
        for j, e in enumerate(r.get("exceptional", [])):
            if not isinstance(e, list) or len(e) != 5 or not _strict_int(e[0]):
                raise MalformedWeight(
                    f"{where}.exceptional[{j}]: expect [index,reNum,reDen,imNum,imDen]")
            exc.append((e[0], _parse_weight(e[1:], f"{where}.exceptional[{j}]")))
        rays.append(Ray(
            id=str(r["id"]),
            kind=str(r["kind"]),
            multiplicity=mult,
            omega=anchor(r["omega"], "omega"),
            alpha=anchor(r["alpha"], "alpha") if "alpha" in r else None,
            exceptional=tuple(sorted(exc)),
        ))
    return validate(OrbitModel(name=str(doc["name"]), cycles=tuple(cycles),
                               rays=tuple(rays)))


def model_to_json(m: ValidatedModel) -> str:
    doc = {
        "name": m.name,
        "cycles": [{"id": c.id, "weights": [w.to_list() for w in c.weights]}
                   for c in m.raw.cycles],
        "rays": [],
    }
    for r in m.raw.rays:
        entry = {
            "id": r.id,
            "kind": r.kind,
            "multiplicity": "omega" if r.multiplicity == OMEGA else r.multiplicity,
            "omega": {"cycle": r.omega.cycle, "phase": r.omega.phase},
        }
        if r.alpha is not None:
            entry["alpha"] = {"cycle": r.alpha.cycle, "phase": r.alpha.phase}
        entry["exceptional"] = [[i] + v.to_list() for i, v in r.exceptional]
        doc["rays"].append(entry)
    return json.dumps(doc, indent=2)


def load_model(path: str) -> ValidatedModel:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_model_json(fh.read())
