"""Fluents, approximate and partial states, actions, conditional plans, problems.

Every fluent set is an ``int`` bitset over the domain's fluent vocabulary:
bit ``i`` is the ``i``-th declared fluent. States and plans are immutable
and hashable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple, Union


class ResourceLimitError(RuntimeError):
    """A configured size cap was exceeded (distinct from a negative answer)."""


def bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def submasks(mask: int) -> Iterator[int]:
    """All submasks of ``mask``, starting with 0 and ending with ``mask``."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


class Vocabulary:
    """Interns fluent names to bit positions in declaration order."""

    __slots__ = ("names", "_index")

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        index = {}
        for i, name in enumerate(names):
            if not name:
                raise ValueError("fluent names must be non-empty")
            if name in index:
                raise ValueError(f"duplicate fluent {name!r}")
            index[name] = i
        self.names = names
        self._index = index

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other):
        return isinstance(other, Vocabulary) and self.names == other.names

    def __hash__(self):
        return hash(self.names)

    def __repr__(self):
        return f"Vocabulary({list(self.names)!r})"

    @property
    def full(self) -> int:
        return (1 << len(self.names)) - 1

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown fluent {name!r}") from None

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= 1 << self.index(name)
        return m

    def names_of(self, mask: int) -> list:
        return [self.names[i] for i in bits(mask)]

    def literals(self, pos: Iterable[str] = (), neg: Iterable[str] = ()) -> "Literals":
        return Literals(self.mask(pos), self.mask(neg))

    def astate(self, true: Iterable[str] = (), false: Iterable[str] = ()) -> "AState":
        return AState(self.mask(true), self.mask(false))

    def pstate(self, true: Iterable[str] = (), false: Iterable[str] = ()) -> "PState":
        return PState(self.mask(true), self.mask(false))

    def format_literals(self, lits: "Literals", sep: str = " & ") -> str:
        parts = []
        for i in bits(lits.pos | lits.neg):
            name = self.names[i]
            parts.append(name if lits.pos >> i & 1 else f"(not {name})")
        return sep.join(parts)

    def format_state(self, state) -> str:
        if state is BOTTOM:
            return "⊥"
        t = ", ".join(self.names_of(state.T))
        f = ", ".join(self.names_of(state.F))
        if isinstance(state, AState):
            return f"<{{{t}}}, {{{f}}}>"
        return f"[{{{t}}}, {{{f}}}]"


class _Bottom:
    """The failure value shared by a-states and p-states."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()


@dataclass(frozen=True, slots=True)
class Literals:
    """A conjunction (set) of fluent literals: ``pos`` fluents true, ``neg`` false.

    Also used for plan guards; a guard is just a normalized literal set.
    """

    pos: int = 0
    neg: int = 0

    @property
    def fluents(self) -> int:
        return self.pos | self.neg

    @property
    def consistent(self) -> bool:
        return not (self.pos & self.neg)

    def excludes(self, other: "Literals") -> bool:
        """True if the two conjunctions cannot hold together."""
        return bool(self.pos & other.neg or self.neg & other.pos)

    def __and__(self, other: "Literals") -> "Literals":
        return Literals(self.pos | other.pos, self.neg | other.neg)


@dataclass(frozen=True, slots=True)
class AState:
    """Approximate state ``<T, F>``; fluents outside ``T | F`` are unknown."""

    T: int = 0
    F: int = 0

    def __post_init__(self):
        if self.T & self.F:
            raise ValueError("a-state true and false sets overlap")

    @property
    def known(self) -> int:
        return self.T | self.F


@dataclass(frozen=True, slots=True)
class PState:
    """Partial state ``[T, F]`` standing for every a-state that extends it."""

    T: int = 0
    F: int = 0

    def __post_init__(self):
        if self.T & self.F:
            raise ValueError("p-state true and false sets overlap")

    @property
    def known(self) -> int:
        return self.T | self.F


State = Union[AState, PState, _Bottom]


def state_key(state) -> Tuple[int, int]:
    """Canonical sort key; BOTTOM sorts first."""
    if state is BOTTOM:
        return (-1, -1)
    return (state.T, state.F)


def canonical(states: Iterable) -> tuple:
    return tuple(sorted(set(states), key=state_key))


def extends(inner: AState, outer: AState) -> bool:
    """True iff ``outer`` extends ``inner`` (``inner`` precedes ``outer``)."""
    return not (inner.T & ~outer.T) and not (inner.F & ~outer.F)


def in_extension(sigma: AState, delta: PState) -> bool:
    return not (delta.T & ~sigma.T) and not (delta.F & ~sigma.F)


def holds(lits: Literals, sigma: AState) -> bool:
    return not (lits.pos & ~sigma.T) and not (lits.neg & ~sigma.F)


# --- actions -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class NonSensing:
    name: str
    pre: Literals
    add: int = 0
    delete: int = 0

    def __post_init__(self):
        if self.add & self.delete:
            raise ValueError(f"action {self.name}: add and del overlap")
        if not self.pre.consistent:
            raise ValueError(f"action {self.name}: inconsistent precondition")

    is_sensing = False


@dataclass(frozen=True, slots=True)
class Sensing:
    name: str
    pre: Literals
    sense: int

    def __post_init__(self):
        if not self.sense:
            raise ValueError(f"sensing action {self.name}: empty sense set")
        if self.sense & self.pre.fluents:
            raise ValueError(f"sensing action {self.name}: sensed fluent in precondition")
        if not self.pre.consistent:
            raise ValueError(f"sensing action {self.name}: inconsistent precondition")

    is_sensing = True

    def restricted(self, sense: int) -> "Sensing":
        """Sub sensing action: same precondition, a strict non-empty subset of the sense set."""
        if not sense or sense & ~self.sense or sense == self.sense:
            raise ValueError("sub sensing action needs a strict non-empty subset")
        return Sensing(self.name, self.pre, sense)


Action = Union[NonSensing, Sensing]


# --- conditional plans -------------------------------------------------------


class Plan:
    """Base class for the conditional plan AST. Nodes cache their hash."""

    __slots__ = ("_hash",)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("plans are immutable")


class Empty(Plan):
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def _key(self):
        return ()

    def __repr__(self):
        return "EMPTY"


EMPTY = Empty()


class Act(Plan):
    """A single non-sensing action."""

    __slots__ = ("action",)

    def __init__(self, action: NonSensing):
        if action.is_sensing:
            raise ValueError(f"{action.name} is a sensing action; use Case")
        object.__setattr__(self, "action", action)

    def _key(self):
        return (self.action,)

    def __repr__(self):
        return f"Act({self.action.name})"


class Seq(Plan):
    __slots__ = ("first", "second")

    def __init__(self, first: Plan, second: Plan):
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)

    def _key(self):
        return (self.first, self.second)

    def __repr__(self):
        return f"Seq({self.first!r}, {self.second!r})"


class Case(Plan):
    """``sensor; case(guard_1 -> plan_1, ..., guard_n -> plan_n)``."""

    __slots__ = ("sensor", "branches")

    def __init__(self, sensor: Sensing, branches: Sequence[Tuple[Literals, Plan]]):
        if not sensor.is_sensing:
            raise ValueError(f"{sensor.name} is not a sensing action")
        branches = tuple((g, p) for g, p in branches)
        if not branches:
            raise ValueError("case plan needs at least one branch")
        for i, (g, _) in enumerate(branches):
            if not g.consistent:
                raise ValueError("inconsistent guard")
            for h, _ in branches[:i]:
                if not g.excludes(h):
                    raise ValueError("case guards are not mutually exclusive")
        object.__setattr__(self, "sensor", sensor)
        object.__setattr__(self, "branches", branches)

    @property
    def guards(self) -> tuple:
        return tuple(g for g, _ in self.branches)

    def _key(self):
        return (self.sensor, self.branches)

    def __repr__(self):
        return f"Case({self.sensor.name}, {list(self.branches)!r})"


def steps(plan: Plan) -> list:
    """Flatten sequencing: the list of ``Act``/``Case`` components of ``plan``."""
    out = []
    stack = [plan]
    while stack:
        node = stack.pop()
        if isinstance(node, Seq):
            stack.append(node.second)
            stack.append(node.first)
        elif node is not EMPTY:
            out.append(node)
    return out


def seq(*plans: Plan) -> Plan:
    """Canonical sequence: flattened, right-associated, without empty steps."""
    items = []
    for p in plans:
        items.extend(steps(p))
    if not items:
        return EMPTY
    out = items[-1]
    for node in reversed(items[:-1]):
        out = Seq(node, out)
    return out


def branching_count(plan: Plan) -> int:
    """Number of case plans occurring in ``plan``."""
    if isinstance(plan, Seq):
        return branching_count(plan.first) + branching_count(plan.second)
    if isinstance(plan, Case):
        return 1 + sum(branching_count(p) for _, p in plan.branches)
    return 0


def case_plans(plan: Plan) -> Iterator[Case]:
    if isinstance(plan, Seq):
        yield from case_plans(plan.first)
        yield from case_plans(plan.second)
    elif isinstance(plan, Case):
        yield plan
        for _, p in plan.branches:
            yield from case_plans(p)


def plan_size(plan: Plan) -> int:
    """Action occurrences plus branches; strictly decreases along subplans."""
    if isinstance(plan, Seq):
        return plan_size(plan.first) + plan_size(plan.second)
    if isinstance(plan, Act):
        return 1
    if isinstance(plan, Case):
        return 1 + popcount(plan.sensor.sense) + sum(1 + plan_size(p) for _, p in plan.branches)
    return 0


# --- domains and problems ----------------------------------------------------


class Domain:
    __slots__ = ("name", "vocab", "actions", "_by_name")

    def __init__(self, name: str, vocab: Vocabulary, actions: Sequence[Action]):
        self.name = name
        self.vocab = vocab
        self.actions = tuple(actions)
        by_name = {}
        full = vocab.full
        for a in self.actions:
            if a.name in by_name:
                raise ValueError(f"duplicate action {a.name!r}")
            used = a.pre.fluents | (a.sense if a.is_sensing else a.add | a.delete)
            if used & ~full:
                raise ValueError(f"action {a.name!r} mentions undeclared fluents")
            by_name[a.name] = a
        self._by_name = by_name

    def action(self, name: str) -> Action:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown action {name!r}") from None

    @property
    def nonsensing(self) -> tuple:
        return tuple(a for a in self.actions if not a.is_sensing)

    @property
    def sensing(self) -> tuple:
        return tuple(a for a in self.actions if a.is_sensing)

    def __repr__(self):
        return f"Domain({self.name!r}, {len(self.vocab)} fluents, {len(self.actions)} actions)"


class Problem:
    """A planning problem <A, O, I, G> over a domain."""

    __slots__ = ("name", "domain", "init", "goal")

    def __init__(self, name: str, domain: Domain, init: Literals, goal: Literals):
        full = domain.vocab.full
        for label, lits in (("init", init), ("goal", goal)):
            if not lits.consistent:
                raise ValueError(f"{label} is inconsistent")
            if lits.fluents & ~full:
                raise ValueError(f"{label} mentions undeclared fluents")
        self.name = name
        self.domain = domain
        self.init = init
        self.goal = goal

    @property
    def vocab(self) -> Vocabulary:
        return self.domain.vocab

    @property
    def actions(self) -> tuple:
        return self.domain.actions

    @property
    def sigma_init(self) -> AState:
        return AState(self.init.pos, self.init.neg)

    @property
    def sigma_goal(self) -> AState:
        return AState(self.goal.pos, self.goal.neg)

    @property
    def delta_goal(self) -> PState:
        return PState(self.goal.pos, self.goal.neg)

    def __repr__(self):
        return f"Problem({self.name!r}, domain={self.domain.name!r})"
