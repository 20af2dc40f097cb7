"""Removing ``x x y`` relators: a surface Dehn twist, then a length-2 collapse."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .presentation import (
    GeometricPresentation,
    Presentation,
    ValidationError,
    Word,
    canonical_relation,
    cyclic_reduce,
    inv,
    validate_geometric,
)


class NotGeometricAfterTwist(ValidationError):
    pass


class NotGeometricAfterRemoval(ValidationError):
    pass


@dataclass(frozen=True)
class XXYHit:
    relation: int
    x: int  # the repeated letter
    y: int  # the remaining letter, exponent as written in x.x.y


def find_xxy(P: GeometricPresentation | Presentation) -> list[XXYHit]:
    hits = []
    for r, w in enumerate(P.relations):
        if len(w) != 3:
            continue
        for rot in (w, w[1:] + w[:1], w[2:] + w[:2]):
            if rot[0] == rot[1] and rot[2] >> 1 != rot[0] >> 1:
                hits.append(XXYHit(r, rot[0], rot[2]))
                break
    return hits


def substitute(words: Sequence[Word], table: dict[int, Word]) -> tuple[Word, ...]:
    """Apply a letter substitution, then cyclically reduce each word."""
    out = []
    for w in words:
        img: list[int] = []
        for x in w:
            img.extend(table.get(x, (x,)))
        out.append(cyclic_reduce(img))
    return tuple(out)


def _is_proper(words: Sequence[Word]) -> bool:
    return all(len(w) >= 2 for w in words)


@dataclass(frozen=True)
class TwistStep:
    before: GeometricPresentation
    after: GeometricPresentation
    y: int
    z: int
    x: int
    affected: tuple[int, ...]

    def inverse_relations(self) -> tuple[Word, ...]:
        """Relators of ``after`` pushed back through z -> y x."""
        y, z, x = self.y, self.z, self.x
        # the generator slot is shared, so z and y carry the same letter codes
        back = {z: (y, x), inv(z): (inv(x), inv(y))}
        return substitute(self.after.relations, back)


def dehn_twist(G: GeometricPresentation, hit: XXYHit, new_name: Optional[str] = None) -> TwistStep:
    """Substitute ``y -> z x^-1`` so that ``x x y`` becomes ``x z``.

    The new generator ``z = y x`` takes over the slot of ``y``; its letter code
    has the exponent of ``y`` as written in the hit.
    """
    x, y = hit.x, hit.y
    z = y
    g = y >> 1
    names = list(G.names)
    if new_name is None:
        new_name = "z"
        k = 1
        while new_name in names:
            new_name = f"z{k}"
            k += 1
    names[g] = new_name
    table = {y: (z, inv(x)), inv(y): (x, inv(z))}
    rels = substitute(G.relations, table)
    affected = tuple(r for r, w in enumerate(G.relations) if any(c >> 1 == g for c in w))
    if not _is_proper(rels):
        raise NotGeometricAfterTwist("twist produced a relator shorter than 2")
    P = Presentation(tuple(names), rels)
    try:
        after = validate_geometric(P, allow_length_two=True)
    except ValidationError as exc:
        raise NotGeometricAfterTwist(str(exc)) from exc
    return TwistStep(G, after, y, z, x, affected)


def remove_length2(G: GeometricPresentation, prefer: Optional[int] = None) -> GeometricPresentation:
    """Drop a length-2 relator ``u v`` and the generator of ``v`` (``v -> u^-1``).

    ``prefer`` names the generator (by letter) to remove when it occurs in a
    length-2 relator.
    """
    cands = [(r, w) for r, w in enumerate(G.relations) if len(w) == 2]
    if not cands:
        raise ValueError("no length-2 relation")
    r, (u, v) = cands[0]
    if prefer is not None:
        for rr, (a, b) in cands:
            if b >> 1 == prefer >> 1:
                r, u, v = rr, a, b
                break
            if a >> 1 == prefer >> 1:
                r, u, v = rr, b, a
                break
    gone = v >> 1
    table = {v: (inv(u),), inv(v): (u,)}
    rels = [w for k, w in enumerate(G.relations) if k != r]
    rels = list(substitute(rels, table))

    def shift(c: int) -> int:
        g = c >> 1
        return c if g < gone else c - 2

    names = tuple(nm for k, nm in enumerate(G.names) if k != gone)
    rels2 = tuple(tuple(shift(c) for c in w) for w in rels)
    if not _is_proper(rels2) or any(c >> 1 == gone for w in rels for c in w):
        raise NotGeometricAfterRemoval("removal left a degenerate relator")
    try:
        return validate_geometric(Presentation(names, rels2), allow_length_two=True)
    except ValidationError as exc:
        raise NotGeometricAfterRemoval(str(exc)) from exc


def same_relators(a: Sequence[Word], b: Sequence[Word]) -> bool:
    return sorted(canonical_relation(w) for w in a) == sorted(canonical_relation(w) for w in b)


@dataclass
class Stage:
    label: str
    presentation: GeometricPresentation
    h_top: Optional[float] = None
    error: Optional[str] = None


@dataclass
class ReductionChain:
    stages: list[Stage] = field(default_factory=list)
    twists: list[TwistStep] = field(default_factory=list)

    @property
    def final(self) -> GeometricPresentation:
        return self.stages[-1].presentation

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "stage": s.label,
                    "presentation": s.presentation.serialize(),
                    "h_top": None if s.h_top is None else float(f"{s.h_top:.15g}"),
                    **({"error": s.error} if s.error else {}),
                }
                for s in self.stages
            ],
            indent=1,
        )


def reduce(
    G: GeometricPresentation,
    entropy: Optional[Callable[[GeometricPresentation], float]] = None,
    max_rounds: int = 16,
) -> ReductionChain:
    """Twist and collapse until no ``x x y`` relator remains.

    ``entropy`` (if given) is evaluated on every stage; failures are recorded
    on the stage instead of aborting the chain.
    """
    chain = ReductionChain()

    def record(label: str, P: GeometricPresentation) -> None:
        st = Stage(label, P)
        if entropy is not None:
            try:
                st.h_top = entropy(P)
            except Exception as exc:  # recorded, the chain goes on
                st.error = f"{type(exc).__name__}: {exc}"
        chain.stages.append(st)

    record("input", G)
    for k in range(max_rounds):
        hits = find_xxy(G)
        if not hits:
            return chain
        step = dehn_twist(G, hits[0])
        chain.twists.append(step)
        record(f"twist {k + 1}", step.after)
        G = remove_length2(step.after, prefer=step.z)
        record(f"removal {k + 1}", G)
    raise RuntimeError("reduction did not terminate")
