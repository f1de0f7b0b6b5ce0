"""Binary action profiles, play histories, and their order combinatorics.

A profile assigns one bit per agent; a history is a nonempty sequence of
profiles of equal width.  Both carry the componentwise partial order.  This
module also provides the unilateral-deviation structure used by the coupling
construction: the neighbor set of one-bit flips, the deviating-agent map, the
mirror map between the flip sets of two ordered profiles, and the six-way
partition of those flip sets together with its bijection.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator

from .errors import BudgetError, DimensionError, InvalidPairError, OrderError

#: Largest agent count for which exact state-space enumeration is supported.
MAX_EXACT_AGENTS = 24


@dataclass(frozen=True)
class ActionProfile:
    """Immutable joint action of ``n`` agents, one bit each.

    Internally the bits are packed into ``mask`` with agent index ``i``
    (0-based) at bit ``i``.  Serialized bitstrings put agent 1 (= internal
    index 0) leftmost.
    """

    n: int
    mask: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DimensionError(f"need at least one agent, got n={self.n}")
        if not 0 <= self.mask < (1 << self.n):
            raise DimensionError(f"mask {self.mask:#x} out of range for n={self.n}")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "ActionProfile":
        seq = tuple(bits)
        if any(b not in (0, 1) for b in seq):
            raise ValueError(f"actions must be 0/1, got {seq}")
        mask = 0
        for i, b in enumerate(seq):
            mask |= b << i
        return cls(len(seq), mask)

    @classmethod
    def from_string(cls, text: str) -> "ActionProfile":
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def zeros(cls, n: int) -> "ActionProfile":
        return cls(n, 0)

    @classmethod
    def ones(cls, n: int) -> "ActionProfile":
        return cls(n, (1 << n) - 1)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> i) & 1 for i in range(self.n))

    def action(self, agent: int) -> int:
        """Agent's bit, 0-based index."""
        return (self.mask >> agent) & 1

    def with_action(self, agent: int, value: int) -> "ActionProfile":
        if value:
            return ActionProfile(self.n, self.mask | (1 << agent))
        return ActionProfile(self.n, self.mask & ~(1 << agent))

    def flip(self, agent: int) -> "ActionProfile":
        return ActionProfile(self.n, self.mask ^ (1 << agent))

    def count_ones(self) -> int:
        return self.mask.bit_count()

    def to_string(self) -> str:
        """Compact bitstring, agent 1 leftmost."""
        return "".join(str((self.mask >> i) & 1) for i in range(self.n))

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.to_string()


def sort_key(profile: ActionProfile) -> tuple[int, ...]:
    """Canonical (lexicographic, agent 1 first) ordering key."""
    return profile.bits


def enumerate_profiles(n: int) -> list[ActionProfile]:
    """All 2^n profiles in canonical order."""
    if n > MAX_EXACT_AGENTS:
        raise BudgetError(f"exact enumeration capped at n={MAX_EXACT_AGENTS}, got {n}")
    return sorted((ActionProfile(n, m) for m in range(1 << n)), key=sort_key)


def _require_same_n(a: ActionProfile, b: ActionProfile) -> None:
    if a.n != b.n:
        raise DimensionError(f"profile widths differ: {a.n} vs {b.n}")


def profile_leq(a: ActionProfile, b: ActionProfile) -> bool:
    """Componentwise a_i <= b_i for every agent."""
    _require_same_n(a, b)
    return a.mask & ~b.mask == 0


@dataclass(frozen=True)
class History:
    """Nonempty path of action profiles of equal width."""

    profiles: tuple[ActionProfile, ...]

    def __post_init__(self) -> None:
        if not self.profiles:
            raise ValueError("a history holds at least one profile")
        n = self.profiles[0].n
        if any(p.n != n for p in self.profiles):
            raise DimensionError("all profiles in a history share one agent count")

    @classmethod
    def of(cls, *profiles: ActionProfile) -> "History":
        return cls(tuple(profiles))

    @property
    def n(self) -> int:
        return self.profiles[0].n

    @property
    def length(self) -> int:
        return len(self.profiles)

    @property
    def last(self) -> ActionProfile:
        return self.profiles[-1]

    def prefix(self, t: int) -> "History":
        """First ``t`` profiles (1-based length)."""
        return History(self.profiles[:t])

    def extended(self, profile: ActionProfile) -> "History":
        return History(self.profiles + (profile,))

    def __iter__(self) -> Iterator[ActionProfile]:
        return iter(self.profiles)

    def __getitem__(self, idx):
        return self.profiles[idx]


def path_leq(alpha: History, beta: History) -> bool:
    """Componentwise-in-time partial order on equal-length paths."""
    if alpha.length != beta.length:
        raise DimensionError(
            f"path lengths differ: {alpha.length} vs {beta.length}"
        )
    return all(profile_leq(a, b) for a, b in zip(alpha, beta))


def unilateral_neighbors(a: ActionProfile) -> tuple[ActionProfile, ...]:
    """The n profiles reachable from ``a`` by exactly one bit flip,
    in canonical order."""
    return tuple(sorted((a.flip(i) for i in range(a.n)), key=sort_key))


def deviating_agent(a: ActionProfile, b: ActionProfile) -> int:
    """1-based index of the agent whose action differs; 0 when a == b.

    Raises InvalidPairError for profiles more than one flip apart.
    """
    _require_same_n(a, b)
    diff = a.mask ^ b.mask
    if diff == 0:
        return 0
    if diff & (diff - 1):
        raise InvalidPairError(
            f"profiles {a.to_string()} and {b.to_string()} differ in more than one agent"
        )
    return diff.bit_length()


def mirror_deviation(
    lower: ActionProfile, upper: ActionProfile, target: ActionProfile
) -> ActionProfile:
    """Replay ``target``'s deviation from ``lower`` onto ``upper``.

    Requires lower <= upper and target one flip away from lower; flips, in
    ``upper``, the bit of the agent deviating between ``lower`` and
    ``target``.  The result is one flip away from ``upper``.
    """
    if not profile_leq(lower, upper):
        raise OrderError(
            f"{lower.to_string()} is not componentwise below {upper.to_string()}"
        )
    agent = deviating_agent(lower, target)
    if agent == 0:
        raise InvalidPairError("target must deviate from the lower profile")
    return upper.flip(agent - 1)


@dataclass(frozen=True)
class PartitionSets:
    """Six-way split of the flip sets of an ordered profile pair (lower <= upper).

    From ``lower``: ``down_low`` collects flips that lower a 1-bit,
    ``up_inside`` the raising flips that stay below ``upper``, and
    ``up_outside`` the raising flips that escape above it.  From ``upper``:
    ``up_high`` collects raising flips, ``down_inside`` the lowering flips
    that stay above ``lower``, and ``down_outside`` the rest.  The mirror map
    restricts to bijections down_low -> down_outside, up_outside -> up_high,
    and up_inside -> down_inside.
    """

    lower: ActionProfile
    upper: ActionProfile
    down_low: tuple[ActionProfile, ...]
    up_inside: tuple[ActionProfile, ...]
    up_outside: tuple[ActionProfile, ...]
    up_high: tuple[ActionProfile, ...]
    down_inside: tuple[ActionProfile, ...]
    down_outside: tuple[ActionProfile, ...]


def partition_sets(lower: ActionProfile, upper: ActionProfile) -> PartitionSets:
    """Partition the one-flip neighborhoods of ``lower`` and ``upper``."""
    if not profile_leq(lower, upper):
        raise OrderError(
            f"{lower.to_string()} is not componentwise below {upper.to_string()}"
        )
    down_low, up_inside, up_outside = [], [], []
    for z in unilateral_neighbors(lower):
        agent = deviating_agent(lower, z) - 1
        if lower.action(agent) == 1:
            down_low.append(z)
        elif profile_leq(z, upper):
            up_inside.append(z)
        else:
            up_outside.append(z)
    up_high, down_inside, down_outside = [], [], []
    for z in unilateral_neighbors(upper):
        agent = deviating_agent(upper, z) - 1
        if upper.action(agent) == 0:
            up_high.append(z)
        elif profile_leq(lower, z):
            down_inside.append(z)
        else:
            down_outside.append(z)
    return PartitionSets(
        lower=lower,
        upper=upper,
        down_low=tuple(down_low),
        up_inside=tuple(up_inside),
        up_outside=tuple(up_outside),
        up_high=tuple(up_high),
        down_inside=tuple(down_inside),
        down_outside=tuple(down_outside),
    )


def enumerate_histories(n: int, length: int) -> Iterator[History]:
    """All |A|^length histories, lexicographic in (t, profile) order."""
    if n > MAX_EXACT_AGENTS:
        raise BudgetError(f"exact enumeration capped at n={MAX_EXACT_AGENTS}, got {n}")
    states = enumerate_profiles(n)
    for combo in product(states, repeat=length):
        yield History(combo)
