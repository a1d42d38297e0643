"""
models.py — Shared dataclasses for chatelet-brauer.

These are the records passed between the classification layer, the local
invariant pipeline and the CLI. Keeping them in one file avoids circular
imports between chatelet, padic and localinv.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

from sympy import Poly, Rational

from .errors import UsageError
from .exact import coeffs_low_first, format_poly, is_rational_square, parse_poly, poly_from_coeffs
from .gcoh import EffCocycle, GIntModule, GroupPresentation


def parse_rational(value: Any, name: str = "value") -> Rational:
    """Rational from an int, a Rational or text such as "-1" or "3/4"."""
    try:
        return Rational(str(value).strip())
    except (TypeError, ValueError, SyntaxError) as exc:
        raise UsageError(f"{name} must be a rational number, got {value!r}") from exc


# ---------------------------------------------------------------------------
# Surfaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceSpec:
    """
    The affine Châtelet surface x² − a·y² = c·P(t) over Q.

    `coeffs` lists P lowest degree first. A "declared-dihedral" spec stands for
    P = t^n − m over a base field where the dihedral action is asserted rather
    than computed; it only reaches the lattice-level operations.
    """
    a: Rational
    c: Rational
    coeffs: tuple[Rational, ...]
    base: str = "Q"          # "Q" | "declared-dihedral"
    label: str = ""

    @classmethod
    def from_text(cls, a: Any, c: Any, P: str, base: str = "Q", label: str = "") -> "SurfaceSpec":
        poly = parse_poly(P)
        return cls(
            parse_rational(a, "a"),
            parse_rational(c, "c"),
            tuple(coeffs_low_first(poly)),
            base,
            label,
        )

    @property
    def P(self) -> Poly:
        return poly_from_coeffs(self.coeffs)

    @property
    def n(self) -> int:
        return len(self.coeffs) - 1

    @property
    def key(self) -> tuple:
        return (self.a, self.c, self.coeffs, self.base)

    @property
    def leading(self) -> Rational:
        return self.coeffs[-1]

    def validate(self) -> "SurfaceSpec":
        if self.a == 0 or is_rational_square(self.a):
            raise UsageError(f"a = {self.a} must be a nonzero non-square")
        if self.c == 0:
            raise UsageError("c must be nonzero")
        if self.n < 2:
            raise UsageError(f"P must have degree at least 2, got {self.n}")
        if self.base not in ("Q", "declared-dihedral"):
            raise UsageError(f"unknown base {self.base!r}")
        if self.P.discriminant() == 0:
            raise UsageError(f"P = {format_poly(self.P)} is not separable")
        if self.base == "declared-dihedral" and any(self.coeffs[1:-1]):
            raise UsageError("a declared dihedral surface needs P = lc·t^n + c0")
        return self

    def to_dict(self) -> dict:
        return {
            "a": str(self.a),
            "c": str(self.c),
            "P": [str(x) for x in self.coeffs],
            "base": self.base,
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurfaceSpec":
        return cls(
            parse_rational(data["a"], "a"),
            parse_rational(data["c"], "c"),
            tuple(parse_rational(x, "P") for x in data["P"]),
            data.get("base", "Q"),
            data.get("label", ""),
        )

    def __str__(self) -> str:
        name = f"{self.label}: " if self.label else ""
        return f"{name}x^2 - ({self.a})y^2 = ({self.c})({format_poly(self.P)})"


@dataclass
class SurfaceModules:
    """
    Galois lattices of U_K ⊂ X_K.

    Div has basis D_{i,j} at index (i-1)·n + j: the component of {t = e_j}
    on which u_i vanishes, with u_1 = x + √a·y and u_2 = x − √a·y. R has basis
    div(t − e_1), …, div(t − e_n), div(u_1); Pic has basis [D_{1,1}], …, [D_{1,n-1}].
    `quotient` maps Div coordinates to Pic coordinates (column convention).
    """
    group: GroupPresentation
    point_perms: list[tuple[int, ...]]
    div: GIntModule
    pic: GIntModule
    R: GIntModule
    quotient: list[list[int]]
    relations: list[list[int]]       # R basis written in Div coordinates
    source: str = "field"            # "field" | "model" | "declared"

    @property
    def n(self) -> int:
        return self.div.rank // 2


# ---------------------------------------------------------------------------
# Brauer classes
# ---------------------------------------------------------------------------


@dataclass
class BrauerClass:
    """
    An efficient 2-cocycle (r, s, t) valued in O(U_K)^× lifting a generator
    of H^1(G, Pic X_K). Only defined modulo constant algebras: every invariant
    derived from it is reported relative to a base point.
    """
    pic_cocycle: EffCocycle
    unit_triple: tuple[Any, Any, Any]
    divisor_triple: EffCocycle
    order_in_quotient: int
    provenance: str = "catalogued"   # "catalogued" | "search" | "trivial"
    notes: list[str] = field(default_factory=list)

    @property
    def class_id(self) -> str:
        return "(" + ", ".join(str(u) for u in self.unit_triple) + ")"

    def __str__(self) -> str:
        lines = [
            "=== Brauer class ===",
            f"  Triple     : {self.class_id}",
            f"  Order      : {self.order_in_quotient} in Br X / Br_0 X",
            f"  Provenance : {self.provenance}",
        ]
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)


@dataclass
class ClassOrderReport:
    """Orders of a unit triple as a cocycle and as a class modulo constant algebras."""
    cocycle_order: int
    quotient_order: int
    steps: list[str] = field(default_factory=list)
    constant_triple: Optional[tuple[Any, Any, Any]] = None
    certified: bool = False

    def __str__(self) -> str:
        lines = [
            "=== Class order ===",
            f"  As cocycle over O(U_K)^x : {self.cocycle_order}",
            f"  In Br U                  : {self.quotient_order}"
            + ("" if self.certified else "  (splitting not certified)"),
        ]
        lines += [f"  {s}" for s in self.steps]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Local points and invariants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalPoint:
    """
    A point of X(Z_p) with x, y rational integers and t a p-adic integer known
    modulo p^precision, stored as its least nonnegative residue.
    """
    p: int
    x: int
    y: int
    t: int
    precision: int
    root_index: int = 0      # which Hensel root of c·P(t) = x² − a·y² was taken

    @property
    def xy(self) -> tuple[int, int]:
        return (self.x, self.y)


@dataclass
class InvariantRecord:
    """One evaluated point: raw and base-relative local invariants with provenance."""
    label: str
    p: int
    x: int
    y: int
    t: int
    class_id: str
    d: int
    raw: Rational
    base: Optional[tuple[int, int]]
    relative: Rational
    precision: int
    guard: int
    embedding: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "p": self.p,
            "x": self.x,
            "y": self.y,
            "t": str(self.t),
            "class_id": self.class_id,
            "d": self.d,
            "raw": str(self.raw),
            "base": list(self.base) if self.base is not None else None,
            "relative": str(self.relative),
            "precision": self.precision,
            "guard": self.guard,
            "embedding": self.embedding,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "InvariantRecord":
        base = data.get("base")
        return cls(
            label=data["label"],
            p=int(data["p"]),
            x=int(data["x"]),
            y=int(data["y"]),
            t=int(data["t"]),
            class_id=data["class_id"],
            d=int(data["d"]),
            raw=Rational(data["raw"]),
            base=(int(base[0]), int(base[1])) if base is not None else None,
            relative=Rational(data["relative"]),
            precision=int(data["precision"]),
            guard=int(data["guard"]),
            embedding=int(data.get("embedding", 0)),
            seed=int(data.get("seed", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class SweepReport:
    """
    Invariants of one class at a list of points, in input order, with the
    surjectivity verdict onto (1/n)Z/Z.
    """
    label: str
    p: int
    class_order: int
    records: list[InvariantRecord] = field(default_factory=list)

    @property
    def attained(self) -> list[Rational]:
        return sorted({r.relative for r in self.records})

    @property
    def surjective(self) -> bool:
        wanted = {Rational(k, self.class_order) for k in range(self.class_order)}
        return wanted <= set(self.attained)

    @property
    def verdict(self) -> str:
        return "surjective" if self.surjective else "inconclusive"

    def __str__(self) -> str:
        lines = [
            f"=== Local invariants: {self.label} at p = {self.p} ===",
            f"  {'(x,y)':<12} {'raw':>8} {'invariant':>10}",
        ]
        for r in self.records:
            lines.append(f"  {f'({r.x},{r.y})':<12} {str(r.raw):>8} {str(r.relative):>10}")
        image = ", ".join(str(v) for v in self.attained)
        lines.append(f"  Image   : {{{image}}}")
        if self.surjective:
            lines.append(
                f"  Verdict : surjective onto (1/{self.class_order})Z/Z; "
                "no Brauer-Manin obstruction certified"
            )
        else:
            lines.append("  Verdict : inconclusive")
        return "\n".join(lines)
