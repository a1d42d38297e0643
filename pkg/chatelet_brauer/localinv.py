"""
localinv.py — Local invariants of Brauer classes at p-adic points.

A unit triple (r, s, t) is specialized at a point of X(Z_p), embedded in
the tower A = K_w·Q_{p^D}, and lifted to a 1-cochain ψ on Gal(A/Q_p). The
invariant is read off the valuation of a product of conjugates of ψ(a)
(direct product towers) or ψ(b) (semidirect towers).

Convention: ψ(c) = r'⁻¹ and ψ(b) = s'⁻¹ where N_c(r') = r and N_b(s') = s.
Values are reported relative to a base point, since a class is only known
modulo constant algebras.
"""

from __future__ import annotations

import logging
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional, Sequence

from sympy import Rational

from .chatelet import UnitExpr, explicit_generator
from .config import RunConfig
from .errors import BoundaryPointError, CocycleConditionError, PrecisionError, UsageError
from .models import BrauerClass, InvariantRecord, LocalPoint, SurfaceSpec, SweepReport
from .numfield import NFElt
from .padic import (
    LocalTower,
    PadicCtx,
    PadicElt,
    hilbert90,
    norm_solve,
    point_from_xy,
    tower_for,
)

logger = logging.getLogger("chatelet_brauer.localinv")

Triple = tuple[PadicElt, PadicElt, PadicElt]


# ---------------------------------------------------------------------------
# Reference data
# ---------------------------------------------------------------------------

# (m, p, (x, y), invariant relative to the first row of its block)
REFERENCE_ROWS: tuple[tuple[int, int, tuple[int, int], Rational], ...] = tuple(
    (m, p, xy, Rational(k, 4))
    for m, p, rows in (
        (22, 2, ((1, 10), (2, 15), (2, 1), (1, 6))),
        (43, 43, ((1, 17), (1, 35), (1, 8), (2, 2))),
        (67, 67, ((1, 2), (11, 2), (2, 4), (2, 3))),
        (70, 2, ((1, 2), (1, 6), (1, 10), (1, 14))),
        (78, 2, ((2, 11), (2, 13), (2, 3), (2, 5))),
        (93, 31, ((1, 17), (1, 5), (1, 4), (1, 8))),
    )
    for k, xy in enumerate(rows)
)


def reference_rows(m: Optional[int] = None) -> list[tuple[int, int, tuple[int, int], Rational]]:
    """Reference rows, optionally restricted to one m."""
    return [row for row in REFERENCE_ROWS if m is None or row[0] == m]


# ---------------------------------------------------------------------------
# Specialization
# ---------------------------------------------------------------------------


def _embed_const(T: LocalTower, c: Any) -> PadicElt:
    if isinstance(c, NFElt):
        return T.embed(c)
    return T.scalar(c)


def _check_factor(T: LocalTower, value: PadicElt, what: str, pt: LocalPoint) -> None:
    if value.u is None or value.v >= T.e * (T.N - T.guard):
        raise BoundaryPointError(
            f"point ({pt.x}, {pt.y}) at p={pt.p} is too close to the boundary: {what} vanishes"
        )


def specialize(cls: BrauerClass, pt: LocalPoint, T: LocalTower) -> Triple:
    """
    The triple evaluated at pt under the tower's embedding of K.

    Raises BoundaryPointError when t − e_j or x + √a·y is indistinguishable
    from zero, and CocycleConditionError when a component loses its fixedness.
    """
    sf = T.lf.sf
    if pt.p != T.p:
        raise UsageError(f"point at p={pt.p} used with a tower at p={T.p}")
    roots = [T.embed(e) for e in sf.roots]
    tp = T.scalar(pt.t)
    u1 = T.scalar(pt.x) + T.embed_sqrt_a() * pt.y
    for j, e in enumerate(roots):
        if any(u.roots[j] for u in cls.unit_triple):
            _check_factor(T, tp - e, f"t - e{j + 1}", pt)
    if any(u.u1 for u in cls.unit_triple):
        _check_factor(T, u1, "x + √a·y", pt)

    def value(u: UnitExpr) -> PadicElt:
        return u.evaluate(_embed_const(T, u.const), roots, u1, tp)

    triple = tuple(value(u) for u in cls.unit_triple)
    _check_fixed(T, triple)
    return triple


def _check_fixed(T: LocalTower, triple: Sequence[PadicElt]) -> None:
    r, s, t = triple
    for name, x, aut in (("r", r, "c"), ("s", s, "b"), ("t", t, "cb")):
        if x.u is None:
            raise PrecisionError(f"{name} vanishes at working precision")
        if not T.close(T.auts[aut](x), x):
            raise CocycleConditionError(f"{name} is not fixed by {aut} in {T!r}")


def embed_constants(T: LocalTower, constants: Sequence[Any]) -> Triple:
    """A constant triple of K moved into the tower."""
    triple = tuple(_embed_const(T, c) for c in constants)
    _check_fixed(T, triple)
    return triple


# ---------------------------------------------------------------------------
# Lifting ψ
# ---------------------------------------------------------------------------


def calibrate(
    T: LocalTower,
    r1: PadicElt,
    s1: PadicElt,
    t: PadicElt,
    rng: Optional[random.Random] = None,
) -> tuple[PadicElt, PadicElt]:
    """
    (r', s'·w) with N_b(w) = 1 and c(w)/w = λ = t / N_cb(r'/s').

    Afterwards N_c(r') = r, N_b(s'') = s and N_cb(r'/s'') = t.
    """
    b, c, cb = T.auts["b"], T.auts["c"], T.auts["cb"]
    n = T.lf.sf.n
    lam = t / T.norm(cb, 2, r1 / s1)
    if T.close(lam, T.one()):
        return r1, s1
    u = hilbert90(T, c, n, lam, rng)
    defect = T.norm(b, 2, u)
    if T.close(defect, T.one()):
        w = u
    else:
        nu = norm_solve(
            T, b, 2, defect.inverse(), uniformizer=T.norm(c, n, T.pi), label="N_c(π)"
        )
        w = u * nu
    s2 = s1 * w
    if not T.close(T.norm(cb, 2, r1 / s2), t):
        raise PrecisionError("calibration: N_cb(r'/s') misses the t-component")
    if not T.close(T.norm(b, 2, s2), T.norm(b, 2, s1)):
        raise PrecisionError("calibration changed N_b(s')")
    logger.debug("Calibrated s' by an element of valuation %s", w.valuation)
    return r1, s2


def lift_psi_direct(
    T: LocalTower,
    triple: Triple,
    rng: Optional[random.Random] = None,
) -> PadicElt:
    """ψ(a) = u_r·μ with σ(ψ(a))/ψ(a) = a(ψ(σ))/ψ(σ) for σ = b, c."""
    if T.lf.structure != "direct_product":
        raise UsageError(f"lift_psi_direct needs a direct product tower, got {T!r}")
    a, b, c = T.auts["a"], T.auts["b"], T.auts["c"]
    n = T.lf.sf.n
    r, s, t = triple
    r1 = norm_solve(T, c, n, r)
    s1 = norm_solve(T, b, 2, s)
    r1, s1 = calibrate(T, r1, s1, t, rng)
    u_r = hilbert90(T, c, n, r1 / a(r1), rng)
    kappa = s1 * u_r / (a(s1) * b(u_r))
    mu = hilbert90(T, b, 2, kappa, rng, base=lambda x: T.trace(c, n, x))
    psi_a = u_r * mu
    for sigma, psi_sigma in ((c, r1.inverse()), (b, s1.inverse())):
        if not T.close(sigma(psi_a) / psi_a, a(psi_sigma) / psi_sigma):
            raise PrecisionError(f"ψ(a) fails its Hilbert 90 condition under {sigma.name}")
    return psi_a


def lift_psi_semidirect(
    T: LocalTower,
    triple: Triple,
    rng: Optional[random.Random] = None,
) -> PadicElt:
    """ψ(b) with c(ψ(b))/ψ(b) = r'·cb(r') / (t·c(s))."""
    if T.lf.structure != "semidirect":
        raise UsageError(f"lift_psi_semidirect needs a semidirect tower, got {T!r}")
    c, cb = T.auts["c"], T.auts["cb"]
    n = T.lf.sf.n
    r, s, t = triple
    r1 = norm_solve(T, c, n, r)
    lam = r1 * cb(r1) / (t * c(s))
    try:
        return hilbert90(T, c, n, lam, rng)
    except CocycleConditionError as exc:
        raise CocycleConditionError(
            "r'·cb(r')/(t·c(s)) is not of norm 1 under c; the specialized triple "
            "or the tower is inconsistent"
        ) from exc


def _read_invariant(T: LocalTower, x: PadicElt, sign: int) -> Rational:
    if x.u is None:
        raise PrecisionError("invariant product vanishes at working precision")
    v = x.valuation
    if v.q != 1:
        raise PrecisionError(f"invariant product has non-integral valuation {v}")
    return Rational(sign * int(v), T.d) % 1


def invariant(T: LocalTower, triple: Triple, rng: Optional[random.Random] = None) -> Rational:
    """The local invariant of the specialized triple, in (1/D)Z/Z."""
    if T.lf.structure == "direct_product":
        psi_a = lift_psi_direct(T, triple, rng)
        return _read_invariant(T, T.norm(T.auts["a"], T.d, psi_a), -1)
    psi_b = lift_psi_semidirect(T, triple, rng)
    s = triple[1]
    product = s ** (T.d // 2) * T.norm(T.auts["b"], T.d, psi_b)
    return _read_invariant(T, product, -1)


# ---------------------------------------------------------------------------
# Evaluation entry points
# ---------------------------------------------------------------------------

_RAW_CACHE: dict[tuple, Rational] = {}
_RAW_LOCK = threading.Lock()


def _ctx(p: int, config: RunConfig) -> PadicCtx:
    return PadicCtx.from_config(p, config)


def local_invariant(
    spec: SurfaceSpec,
    cls: BrauerClass,
    pt: LocalPoint,
    config: Optional[RunConfig] = None,
) -> Rational:
    """Raw invariant at pt; only meaningful up to the constant-algebra ambiguity."""
    config = config or RunConfig()
    key = (
        spec.key, cls.class_id, pt.p, pt.x, pt.y, pt.t,
        config.precision, config.guard, config.d, config.embedding, config.seed,
    )
    with _RAW_LOCK:
        cached = _RAW_CACHE.get(key)
    if cached is not None:
        return cached
    T = tower_for(spec, pt.p, config.d, _ctx(pt.p, config), config.embedding)
    rng = random.Random(config.seed)
    value = invariant(T, specialize(cls, pt, T), rng)
    logger.debug("inv_%d at (%d, %d) = %s", pt.p, pt.x, pt.y, value)
    with _RAW_LOCK:
        _RAW_CACHE[key] = value
    return value


def constant_class_invariant(
    spec: SurfaceSpec,
    constants: Sequence[Any],
    p: int,
    config: Optional[RunConfig] = None,
) -> Rational:
    """Local invariant at p of a triple of constants of K."""
    config = config or RunConfig()
    T = tower_for(spec, p, config.d, _ctx(p, config), config.embedding)
    return invariant(T, embed_constants(T, constants), random.Random(config.seed))


def relative_invariant(
    spec: SurfaceSpec,
    pt: LocalPoint,
    base: Optional[LocalPoint],
    p: Optional[int] = None,
    cls: Optional[BrauerClass] = None,
    config: Optional[RunConfig] = None,
) -> InvariantRecord:
    """
    Record for pt with value inv(pt) − inv(base) mod Z.

    Without a base point the raw value is reported in both fields.
    """
    config = config or RunConfig()
    p = p if p is not None else pt.p
    if pt.p != p or (base is not None and base.p != p):
        raise UsageError(f"points must lie over p={p}")
    cls = cls or explicit_generator(spec)
    raw = local_invariant(spec, cls, pt, config)
    relative = raw
    if base is not None:
        relative = (raw - local_invariant(spec, cls, base, config)) % 1
    T = tower_for(spec, p, config.d, _ctx(p, config), config.embedding)
    return InvariantRecord(
        label=spec.label or str(spec),
        p=p,
        x=pt.x,
        y=pt.y,
        t=pt.t,
        class_id=cls.class_id,
        d=T.d,
        raw=raw,
        base=base.xy if base is not None else None,
        relative=relative,
        precision=config.precision,
        guard=config.guard,
        embedding=config.embedding,
        seed=config.seed,
    )


def points_from_pairs(
    spec: SurfaceSpec, p: int, pairs: Sequence[tuple[int, int]], config: Optional[RunConfig] = None
) -> list[LocalPoint]:
    """LocalPoints for (x, y) pairs; a pair with no t in Z_p is a usage error."""
    ctx = _ctx(p, config or RunConfig())
    out = []
    for x, y in pairs:
        pt = point_from_xy(spec, p, x, y, ctx)
        if pt is None:
            raise UsageError(f"({x}, {y}) has no t in Z_{p} on {spec}")
        out.append(pt)
    return out


def sweep(
    spec: SurfaceSpec,
    p: int,
    points: Sequence[LocalPoint],
    base: Optional[LocalPoint] = None,
    config: Optional[RunConfig] = None,
    cls: Optional[BrauerClass] = None,
) -> SweepReport:
    """
    Relative invariants at every point, in input order.

    The base defaults to the first point. Points are evaluated on a thread
    pool of `config.jobs` workers sharing one tower.
    """
    config = config or RunConfig()
    if not points:
        raise UsageError("sweep needs at least one point")
    cls = cls or explicit_generator(spec)
    base = base if base is not None else points[0]
    tower_for(spec, p, config.d, _ctx(p, config), config.embedding)

    def evaluate(pt: LocalPoint) -> InvariantRecord:
        return relative_invariant(spec, pt, base, p, cls, config)

    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        records = list(pool.map(evaluate, points))
    report = SweepReport(spec.label or str(spec), p, cls.order_in_quotient, records)
    logger.info("Sweep of %s at p=%d: %s", report.label, p, report.verdict)
    return report


def clear_caches() -> None:
    with _RAW_LOCK:
        _RAW_CACHE.clear()


__all__ = [
    "REFERENCE_ROWS",
    "calibrate",
    "clear_caches",
    "constant_class_invariant",
    "embed_constants",
    "reference_rows",
    "invariant",
    "lift_psi_direct",
    "lift_psi_semidirect",
    "local_invariant",
    "point_from_xy",
    "points_from_pairs",
    "relative_invariant",
    "specialize",
    "sweep",
]
