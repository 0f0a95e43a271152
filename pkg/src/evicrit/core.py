"""Core domain model: linguistic grades, grade subsets, mass functions, and
the fourteen-indicator catalog.

All types here are immutable values.  Subsets are encoded as bitmasks over
the fixed five-grade frame so that equality, hashing, and iteration order
are deterministic (always grade order).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, Mapping

from .errors import (
    FrameMismatch,
    MassOutOfRange,
    MassSumInvalid,
    NonzeroEmptySet,
    ParseError,
)

#: tolerance for "masses sum to one" checks
MASS_SUM_TOL = 1e-9
#: masses smaller than this are pruned after combination arithmetic
MASS_PRUNE_EPS = 1e-12


class Label(IntEnum):
    """The five ordered linguistic grades, lowest to highest."""

    VL = 0
    L = 1
    M = 2
    H = 3
    VH = 4

    def __str__(self) -> str:
        return self.name


#: the frame of discernment: all five grades in order
FRAME: tuple[Label, ...] = tuple(Label)


def parse_label(name: str) -> Label:
    """Parse a grade name ("VL", "L", "M", "H", "VH")."""
    try:
        return Label[name]
    except KeyError:
        raise ParseError(f"unknown grade name {name!r}; expected one of "
                         + ", ".join(l.name for l in FRAME)) from None


@dataclass(frozen=True, order=True)
class Subset:
    """An immutable set of grades, one bit per grade.

    Bit ``i`` is set exactly when ``Label(i)`` is a member.  Intersection is
    a bitwise AND, cardinality a popcount, and members always iterate in
    grade order.
    """

    bits: int = 0

    def __post_init__(self):
        if not 0 <= self.bits < (1 << len(FRAME)):
            raise ValueError(f"subset bits out of range: {self.bits}")

    @classmethod
    def of(cls, *labels: Label) -> "Subset":
        bits = 0
        for label in labels:
            bits |= 1 << int(label)
        return cls(bits)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "Subset":
        return cls.of(*(parse_label(n) for n in names))

    @property
    def members(self) -> tuple[Label, ...]:
        return tuple(l for l in FRAME if self.bits >> int(l) & 1)

    def names(self) -> tuple[str, ...]:
        return tuple(l.name for l in self.members)

    def is_empty(self) -> bool:
        return self.bits == 0

    def issubset(self, other: "Subset") -> bool:
        return self.bits & ~other.bits == 0

    def __contains__(self, label: Label) -> bool:
        return bool(self.bits >> int(label) & 1)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.members)

    def __len__(self) -> int:
        return self.bits.bit_count()

    def __and__(self, other: "Subset") -> "Subset":
        return Subset(self.bits & other.bits)

    def __or__(self, other: "Subset") -> "Subset":
        return Subset(self.bits | other.bits)

    def __str__(self) -> str:
        return "{" + ",".join(self.names()) + "}"


EMPTY_SET = Subset(0)
FULL_SET = Subset.of(*FRAME)


def intersect(a: Subset, b: Subset) -> Subset:
    """Set intersection of two grade subsets."""
    return a & b


def cardinality(a: Subset) -> int:
    """Number of grades in the subset (0..5)."""
    return len(a)


def subsets_of(universe: Subset = FULL_SET) -> tuple[Subset, ...]:
    """All subsets of ``universe``, the empty set first, in bitmask order."""
    mask = universe.bits
    out = []
    sub = 0
    while True:
        out.append(Subset(sub))
        if sub == mask:
            break
        sub = (sub - mask) & mask
    return tuple(out)


def _canonical_order(subset_mass: tuple[Subset, float]) -> tuple[int, int]:
    # smallest sets first, then grade order within a size
    return (len(subset_mass[0]), subset_mass[0].bits)


class Bpa:
    """A basic probability assignment: unit belief mass over grade subsets.

    ``frame`` is the subset acting as the frame of discernment; masses may
    only sit on its subsets.  Instances are immutable by convention: no
    method mutates, and the internal mapping is never handed out.
    """

    __slots__ = ("_masses", "frame")

    def __init__(self, masses: Mapping[Subset, float] | Iterable[tuple[Subset, float]],
                 frame: Subset = FULL_SET):
        items = masses.items() if isinstance(masses, Mapping) else masses
        acc: dict[Subset, float] = {}
        for subset, mass in items:
            acc[subset] = acc.get(subset, 0.0) + float(mass)
        self._masses = acc
        self.frame = frame

    def mass(self, subset: Subset) -> float:
        return self._masses.get(subset, 0.0)

    def focal(self) -> tuple[tuple[Subset, float], ...]:
        """(subset, mass) pairs with positive mass, in canonical order."""
        positive = [(s, m) for s, m in self._masses.items() if m > 0.0]
        return tuple(sorted(positive, key=_canonical_order))

    def items(self) -> tuple[tuple[Subset, float], ...]:
        """All stored (subset, mass) pairs, zero masses included."""
        return tuple(sorted(self._masses.items(), key=_canonical_order))

    def total(self) -> float:
        return math.fsum(self._masses.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Bpa):
            return NotImplemented
        mine = {s: m for s, m in self._masses.items() if m != 0.0}
        theirs = {s: m for s, m in other._masses.items() if m != 0.0}
        return self.frame == other.frame and mine == theirs

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {m:.6g}" for s, m in self.focal())
        return f"Bpa({{{body}}})"


def vacuous(frame: Subset = FULL_SET) -> Bpa:
    """The vacuous assignment m(frame) = 1: total ignorance."""
    return Bpa({frame: 1.0}, frame=frame)


def unit_normalized(masses: Mapping[Subset, float], frame: Subset = FULL_SET) -> Bpa:
    """Build a Bpa whose masses sum to exactly 1.0.

    Scales proportionally, then absorbs the remaining float residue into
    the heaviest focal set (deterministic tie-break) so repeated
    normalization is a no-op.
    """
    positive = {s: m for s, m in masses.items() if m > 0.0}
    total = math.fsum(positive.values())
    if not positive or total <= 0.0:
        raise MassSumInvalid("no positive mass to normalize")
    if total != 1.0:
        positive = {s: m / total for s, m in positive.items()}
    for _ in range(8):
        residue = 1.0 - math.fsum(positive.values())
        if residue == 0.0:
            break
        heaviest = max(positive, key=lambda s: (positive[s], -s.bits))
        positive[heaviest] += residue
    return Bpa(positive, frame=frame)


def validate_bpa(b: Bpa) -> Bpa:
    """Check all Bpa invariants; renormalize drift within tolerance.

    Returns ``b`` itself when the masses already sum to exactly 1.0.  When
    the sum is off by at most ``MASS_SUM_TOL`` the masses are renormalized
    proportionally; a larger gap, a mass outside [0, 1], positive mass on
    the empty set, or a focal set outside the frame is an error.
    """
    for subset, mass in b.items():
        if math.isnan(mass) or not 0.0 <= mass <= 1.0:
            raise MassOutOfRange(f"mass {mass!r} on {subset} outside [0, 1]")
        if not subset.issubset(b.frame):
            raise FrameMismatch(f"focal set {subset} outside frame {b.frame}")
    empty_mass = b.mass(EMPTY_SET)
    if empty_mass != 0.0:
        raise NonzeroEmptySet(f"empty set carries mass {empty_mass!r}")
    total = b.total()
    if abs(total - 1.0) > MASS_SUM_TOL:
        raise MassSumInvalid(f"masses sum to {total!r}, not 1")
    if total == 1.0:
        return b
    return unit_normalized(dict(b.items()), frame=b.frame)


# --- BPA fixture format (JSON) ----------------------------------------------

def bpa_to_dict(b: Bpa) -> dict:
    """Serialize to the fixture layout: frame names plus subset/mass entries."""
    return {
        "frame": list(b.frame.names()),
        "masses": [{"subset": list(s.names()), "mass": m} for s, m in b.focal()],
    }


def bpa_from_dict(data: Mapping) -> Bpa:
    """Parse the fixture layout produced by :func:`bpa_to_dict` and validate."""
    try:
        frame_names = data["frame"]
        entries = data["masses"]
    except (KeyError, TypeError):
        raise ParseError('BPA object needs "frame" and "masses" keys') from None
    frame = Subset.from_names(frame_names)
    masses: dict[Subset, float] = {}
    for pos, entry in enumerate(entries):
        try:
            subset = Subset.from_names(entry["subset"])
            mass = float(entry["mass"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f'masses[{pos}] needs "subset" and numeric "mass"') from None
        masses[subset] = masses.get(subset, 0.0) + mass
    return validate_bpa(Bpa(masses, frame=frame))


def bpa_to_json(b: Bpa) -> str:
    return json.dumps(bpa_to_dict(b), indent=2)


def bpa_from_json(text: str) -> Bpa:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid BPA JSON: {e}") from e
    return bpa_from_dict(data)


# --- indicator catalog -------------------------------------------------------

@dataclass(frozen=True)
class Indicator:
    """One evaluation criterion: a stable id (B1..B14) and what it measures."""

    id: str
    description: str


#: the fourteen DNA-sequence-analysis tool indicators, in id order
CATALOG: tuple[Indicator, ...] = (
    Indicator("B1", "Align Sequences"),
    Indicator("B2", "Feature selection"),
    Indicator("B3", "Find Genes"),
    Indicator("B4", "Find t RNA"),
    Indicator("B5", "Find Transcriptional elements"),
    Indicator("B6", "Online primer design sites"),
    Indicator("B7", "ORF identification"),
    Indicator("B8", "Pattern/Motif recognition"),
    Indicator("B9", "PCR oligonucleotide resources"),
    Indicator("B10", "PCR primer selection"),
    Indicator("B11", "PCR primers software"),
    Indicator("B12", "Restriction, Detect repeats & unusual Patterns"),
    Indicator("B13", "Transmembrane domain Identification"),
    Indicator("B14", "Other Tools"),
)

CATALOG_IDS: tuple[str, ...] = tuple(i.id for i in CATALOG)
_BY_ID = {i.id: i for i in CATALOG}


def indicator(indicator_id: str) -> Indicator:
    """Look up a catalog indicator by id; KeyError when unknown."""
    return _BY_ID[indicator_id]


def catalog_to_json() -> str:
    return json.dumps([{"id": i.id, "description": i.description} for i in CATALOG],
                      indent=2)


def catalog_from_json(text: str) -> tuple[Indicator, ...]:
    try:
        data = json.loads(text)
        return tuple(Indicator(e["id"], e["description"]) for e in data)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ParseError(f"invalid catalog JSON: {e}") from e
