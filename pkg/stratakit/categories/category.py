from typing import (
    Any,
    Callable,
    Dict,
    Hashable,
    Iterable,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
)
import logging

from stratakit.checks.engine import CheckEngine, Report
from stratakit.checks.monitor import record_category
from stratakit.config import Budgets, get_budgets
from stratakit.errors import BudgetExceededError, CategoryError
from stratakit.posets.poset import FinPoset

logger = logging.getLogger(__name__)

Morphism = Tuple[int, int, Hashable]


class FinCategory:
    """
    A finite category with materialized hom-sets and composition table.

    Objects and morphisms are addressed by position. A morphism is
    (source, target, payload); ``composition[(f, g)]`` is g∘f for every pair with
    target(f) = source(g).
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        morphisms: Sequence[Morphism],
        identities: Sequence[int],
        composition: Dict[Tuple[int, int], int],
        name: str = "category",
        check: bool = True,
    ):
        self.objects: Tuple[Hashable, ...] = tuple(objects)
        self.morphisms: Tuple[Morphism, ...] = tuple(
            (int(s), int(t), p) for s, t, p in morphisms
        )
        self.identities: Tuple[int, ...] = tuple(identities)
        self.composition = dict(composition)
        self.name = name
        self.homs: Dict[Tuple[int, int], List[int]] = {}
        self._outgoing: Dict[int, List[int]] = {}
        for m, (s, t, _) in enumerate(self.morphisms):
            self.homs.setdefault((s, t), []).append(m)
            self._outgoing.setdefault(s, []).append(m)
        self.index: Dict[Morphism, int] = {m: i for i, m in enumerate(self.morphisms)}
        self._object_index = {x: i for i, x in enumerate(self.objects)}
        if len(self._object_index) != len(self.objects):
            raise CategoryError(f"{name}: object labels must be distinct")
        if check:
            problems = self.violations()
            if problems:
                raise CategoryError(f"{name}: {problems[0]}")

    @classmethod
    def from_hom_function(
        cls,
        objects: Sequence[Hashable],
        hom: Callable[[int, int], Iterable[Hashable]],
        compose: Callable[[int, int, int, Hashable, Hashable], Hashable],
        identity: Callable[[int], Hashable],
        name: str = "category",
        budgets: Optional[Budgets] = None,
        check: bool = True,
    ) -> "FinCategory":
        """
        Materialize a category from hom-set and composition callbacks.

        Args:
            objects: Object labels
            hom: hom(x, y) yields the payloads of the morphisms x → y
            compose: compose(x, y, z, f, g) is the payload of g∘f for f: x → y, g: y → z
            identity: identity(x) is the payload of the identity of x
            name: Name used in errors and logs
            budgets: Optional budget override; max_morphisms bounds the size
            check: Verify identity laws and associativity

        Returns:
            The category; composites outside their hom-set raise CategoryError
        """
        limit = get_budgets(budgets).max_morphisms
        n = len(objects)
        morphisms: List[Morphism] = []
        for x in range(n):
            for y in range(n):
                for p in sorted(set(hom(x, y))):
                    morphisms.append((x, y, p))
                    if len(morphisms) > limit:
                        raise BudgetExceededError(
                            "max_morphisms", limit, len(morphisms)
                        )
        index = {m: i for i, m in enumerate(morphisms)}
        identities = []
        for x in range(n):
            key = (x, x, identity(x))
            if key not in index:
                raise CategoryError(
                    f"{name}: identity of object {x} is not an endomorphism"
                )
            identities.append(index[key])

        outgoing: Dict[int, List[int]] = {}
        for i, (s, _, _) in enumerate(morphisms):
            outgoing.setdefault(s, []).append(i)
        composition: Dict[Tuple[int, int], int] = {}
        for f, (x, y, pf) in enumerate(morphisms):
            for g in outgoing.get(y, []):
                _, z, pg = morphisms[g]
                key = (x, z, compose(x, y, z, pf, pg))
                if key not in index:
                    raise CategoryError(
                        f"{name}: composite of {f} and {g} leaves the hom-set "
                        f"({x}, {z})"
                    )
                composition[(f, g)] = index[key]

        category = cls(
            objects, morphisms, identities, composition, name=name, check=check
        )
        record_category(len(morphisms))
        logger.info(f"Built {name} with {n} objects and {len(morphisms)} morphisms")
        return category

    @property
    def num_objects(self) -> int:
        return len(self.objects)

    @property
    def num_morphisms(self) -> int:
        return len(self.morphisms)

    def object_index(self, label: Hashable) -> int:
        try:
            return self._object_index[label]
        except KeyError:
            raise CategoryError(f"{self.name}: object {label!r} not found")

    def src(self, m: int) -> int:
        return self.morphisms[m][0]

    def tgt(self, m: int) -> int:
        return self.morphisms[m][1]

    def payload(self, m: int) -> Hashable:
        return self.morphisms[m][2]

    def hom(self, x: int, y: int) -> List[int]:
        return self.homs.get((x, y), [])

    def identity(self, x: int) -> int:
        return self.identities[x]

    def compose(self, f: int, g: int) -> int:
        """g∘f: first f, then g."""
        try:
            return self.composition[(f, g)]
        except KeyError:
            raise CategoryError(
                f"{self.name}: morphisms {f} and {g} are not composable"
            )

    def violations(self) -> List[str]:
        problems = []
        for x, i in enumerate(self.identities):
            if self.morphisms[i][:2] != (x, x):
                problems.append(f"identity of object {x} is not an endomorphism")
        for f, (x, y, _) in enumerate(self.morphisms):
            for g in self.outgoing(y):
                if (f, g) not in self.composition:
                    problems.append(f"composite of {f} and {g} is missing")
                    return problems
                if self.morphisms[self.composition[(f, g)]][:2] != (x, self.tgt(g)):
                    problems.append(f"composite of {f} and {g} has the wrong endpoints")
            left = self.composition.get((self.identities[x], f))
            right = self.composition.get((f, self.identities[y]))
            if left != f or right != f:
                problems.append(f"identity law fails for morphism {f}")
        if problems:
            return problems
        for f in range(self.num_morphisms):
            for g in self.outgoing(self.tgt(f)):
                gf = self.composition[(f, g)]
                for h in self.outgoing(self.tgt(g)):
                    hg = self.composition[(g, h)]
                    if self.composition[(gf, h)] != self.composition[(f, hg)]:
                        return [f"associativity fails for morphisms {f}, {g}, {h}"]
        return problems

    def outgoing(self, x: int) -> List[int]:
        return self._outgoing.get(x, [])

    def inverse(self, f: int) -> Optional[int]:
        x, y = self.src(f), self.tgt(f)
        for g in self.hom(y, x):
            back = self.composition[(f, g)] == self.identities[x]
            forth = self.composition[(g, f)] == self.identities[y]
            if back and forth:
                return g
        return None

    def is_iso(self, f: int) -> bool:
        return self.inverse(f) is not None

    def isomorphism(self, x: int, y: int) -> Optional[int]:
        """Some isomorphism x → y, if the objects are isomorphic."""
        for f in self.hom(x, y):
            if self.is_iso(f):
                return f
        return None

    def is_terminal(self, x: int) -> bool:
        return all(len(self.hom(y, x)) == 1 for y in range(self.num_objects))

    def is_initial(self, x: int) -> bool:
        return all(len(self.hom(x, y)) == 1 for y in range(self.num_objects))

    def terminal_object(self) -> Optional[int]:
        return next((x for x in range(self.num_objects) if self.is_terminal(x)), None)

    def initial_object(self) -> Optional[int]:
        return next((x for x in range(self.num_objects) if self.is_initial(x)), None)

    def right_closed(self, members: Iterable[int]) -> Optional[int]:
        """A morphism leaving the object set, or None when the set is right closed."""
        inside = set(members)
        for f, (x, y, _) in enumerate(self.morphisms):
            if x in inside and y not in inside:
                return f
        return None

    def left_closed(self, members: Iterable[int]) -> Optional[int]:
        """A morphism entering the object set, or None when the set is left closed."""
        inside = set(members)
        for f, (x, y, _) in enumerate(self.morphisms):
            if y in inside and x not in inside:
                return f
        return None

    def full_subcategory(
        self, members: Iterable[int], name: Optional[str] = None
    ) -> Tuple["FinCategory", "Functor"]:
        """
        The full subcategory on an object set, with its inclusion functor.

        Objects keep their relative order.
        """
        kept = sorted(set(members))
        position = {x: i for i, x in enumerate(kept)}
        parent_ids = [
            f
            for f, (x, y, _) in enumerate(self.morphisms)
            if x in position and y in position
        ]
        new_id = {f: i for i, f in enumerate(parent_ids)}
        morphisms = [
            (position[self.src(f)], position[self.tgt(f)], self.payload(f))
            for f in parent_ids
        ]
        composition = {
            (new_id[f], new_id[g]): new_id[h]
            for (f, g), h in self.composition.items()
            if f in new_id and g in new_id
        }
        sub = FinCategory(
            [self.objects[x] for x in kept],
            morphisms,
            [new_id[self.identities[x]] for x in kept],
            composition,
            name=name or f"full subcategory of {self.name}",
            check=False,
        )
        return sub, Functor(sub, self, kept, parent_ids, check=False)

    def opposite(self) -> "FinCategory":
        return FinCategory(
            self.objects,
            [(t, s, p) for s, t, p in self.morphisms],
            self.identities,
            {(g, f): h for (f, g), h in self.composition.items()},
            name=f"opposite of {self.name}",
            check=False,
        )

    def __repr__(self) -> str:
        return (
            f"FinCategory({self.name!r}, objects={self.num_objects}, "
            f"morphisms={self.num_morphisms})"
        )


class Functor:
    """A functor between finite categories, given on object and morphism positions."""

    def __init__(
        self,
        source: FinCategory,
        target: FinCategory,
        object_map: Sequence[int],
        morphism_map: Sequence[int],
        check: bool = True,
    ):
        self.source = source
        self.target = target
        self.object_map: Tuple[int, ...] = tuple(object_map)
        self.morphism_map: Tuple[int, ...] = tuple(morphism_map)
        if check:
            problems = self.violations()
            if problems:
                raise CategoryError(
                    f"Invalid functor {source.name} → {target.name}: {problems[0]}"
                )

    @classmethod
    def identity(cls, c: FinCategory) -> "Functor":
        return cls(c, c, range(c.num_objects), range(c.num_morphisms), check=False)

    def obj(self, x: int) -> int:
        return self.object_map[x]

    def mor(self, f: int) -> int:
        return self.morphism_map[f]

    def violations(self) -> List[str]:
        s, t = self.source, self.target
        covers_objects = len(self.object_map) == s.num_objects
        if not covers_objects or len(self.morphism_map) != s.num_morphisms:
            return ["maps do not cover the source"]
        problems = []
        for f, (x, y, _) in enumerate(s.morphisms):
            image = self.morphism_map[f]
            if t.morphisms[image][:2] != (self.object_map[x], self.object_map[y]):
                problems.append(f"image of morphism {f} has the wrong endpoints")
        for x, i in enumerate(s.identities):
            if self.morphism_map[i] != t.identities[self.object_map[x]]:
                problems.append(f"identity of object {x} is not preserved")
        if problems:
            return problems
        for (f, g), h in s.composition.items():
            image = t.compose(self.morphism_map[f], self.morphism_map[g])
            if self.morphism_map[h] != image:
                return [f"composite of {f} and {g} is not preserved"]
        return problems


def compose_functors(f: Functor, g: Functor) -> Functor:
    """g∘f."""
    return Functor(
        f.source,
        g.target,
        [g.obj(f.obj(x)) for x in range(f.source.num_objects)],
        [g.mor(f.mor(m)) for m in range(f.source.num_morphisms)],
        check=False,
    )


def poset_category(p: FinPoset, name: str = "poset") -> FinCategory:
    """A poset viewed as a thin category; every morphism carries payload 0."""
    return FinCategory.from_hom_function(
        p.elements,
        lambda x, y: [0] if p.is_leq(x, y) else [],
        lambda x, y, z, f, g: 0,
        lambda x: 0,
        name=name,
        check=False,
    )


def comma_category(
    f: Functor, x: int, name: Optional[str] = None
) -> Tuple[FinCategory, Functor]:
    """
    The comma category of f over an object x of its target, with its projection to the
    source.

    Objects are pairs (a, m) with m: f(a) → x; morphisms (a, m) → (a', m') are the
    morphisms u: a → a' with m'∘f(u) = m. Object labels are (label of a, m).
    """
    s, t = f.source, f.target
    pairs = [(a, m) for a in range(s.num_objects) for m in t.hom(f.obj(a), x)]

    def hom(i: int, j: int) -> List[int]:
        (a, m), (b, n) = pairs[i], pairs[j]
        return [u for u in s.hom(a, b) if t.compose(f.mor(u), n) == m]

    comma = FinCategory.from_hom_function(
        [(s.objects[a], m) for a, m in pairs],
        hom,
        lambda i, j, k, u, v: s.compose(u, v),
        lambda i: s.identities[pairs[i][0]],
        name=name or f"comma of {s.name} over {t.objects[x]!r}",
        check=False,
    )
    projection = Functor(
        comma,
        s,
        [a for a, _ in pairs],
        [u for _, _, u in comma.morphisms],
        check=False,
    )
    return comma, projection


def check_equivalence(f: Functor, subject: Optional[str] = None) -> Report:
    """
    Brute-force check that a functor is an equivalence.

    Args:
        f: A valid functor
        subject: Report subject

    Returns:
        Report with checks essentially_surjective and fully_faithful, carrying
        witnesses on failure
    """
    s, t = f.source, f.target
    engine = CheckEngine(subject or f"equivalence {s.name} → {t.name}")

    def essentially_surjective():
        images = sorted(set(f.object_map))
        missed = [y for y in range(t.num_objects)
                  if not any(t.isomorphism(i, y) is not None for i in images)]
        if not missed:
            return True, "Every object is isomorphic to an image object", None
        details = {"objects": [repr(t.objects[y]) for y in missed]}
        return False, "Objects not isomorphic to any image object", details

    def fully_faithful():
        for a in range(s.num_objects):
            for b in range(s.num_objects):
                source_hom = s.hom(a, b)
                image = [f.mor(u) for u in source_hom]
                target_hom = t.hom(f.obj(a), f.obj(b))
                details = {"objects": [repr(s.objects[a]), repr(s.objects[b])]}
                if len(set(image)) != len(image):
                    return False, "Hom map is not injective", details
                if sorted(image) != sorted(target_hom):
                    return False, "Hom map is not surjective", details
        return True, "Every hom map is bijective", None

    engine.add_check("essentially_surjective", essentially_surjective)
    engine.add_check("fully_faithful", fully_faithful)
    return engine.run()


class AdjointSearch(NamedTuple):
    """Terminal objects of the comma categories of a functor, or objects lacking one."""
    assignment: Dict[int, Tuple[int, int]]
    missing: List[int]

    @property
    def exists(self) -> bool:
        return not self.missing


def find_right_adjoint(f: Functor) -> AdjointSearch:
    """
    Search a right adjoint of f objectwise.

    f has a right adjoint iff every comma category of f over an object d has a terminal
    object (a, m); then d ↦ a, with counit m: f(a) → d.
    """
    assignment: Dict[int, Tuple[int, int]] = {}
    missing = []
    for d in range(f.target.num_objects):
        comma, _ = comma_category(f, d)
        terminal = comma.terminal_object()
        if terminal is None:
            missing.append(d)
            continue
        a = f.source.object_index(comma.objects[terminal][0])
        assignment[d] = (a, comma.objects[terminal][1])
    logger.debug(
        f"Right adjoint search on {f.source.name}: {len(missing)} objects without "
        f"terminal comma object"
    )
    return AdjointSearch(assignment=assignment, missing=missing)


def describe(c: FinCategory) -> Dict[str, Any]:
    """Summary used in reports."""
    return {
        "name": c.name,
        "objects": c.num_objects,
        "morphisms": c.num_morphisms,
    }
