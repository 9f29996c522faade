"""Multi-index arithmetic and downward-closed index sets.

A multi-index is a tuple of non-negative integer polynomial degrees, one
per parameter direction.  Index sets are *downward closed* (monotone) when
every componentwise-smaller neighbour of a member is also a member; sparse
interpolation operators are only well defined on such sets.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

MultiIndex = tuple[int, ...]


class DimensionMismatchError(ValueError):
    """Raised when multi-indices of different lengths are mixed."""


class NotDownwardClosedError(ValueError):
    """Raised when an operation requires a downward-closed index set."""


def as_multiindex(exponents: Iterable[int]) -> MultiIndex:
    """Validate and normalize ``exponents`` into a multi-index tuple."""
    raw = tuple(exponents)
    nu = tuple(int(e) for e in raw)
    if any(e != r for e, r in zip(nu, raw)):
        raise ValueError(f"multi-index entries must be integers, got {raw}")
    if len(nu) < 1:
        raise ValueError("multi-index must have dimension >= 1")
    if any(e < 0 for e in nu):
        raise ValueError(f"multi-index entries must be >= 0, got {nu}")
    return nu


def total_degree(nu: MultiIndex) -> int:
    """Sum of the exponents of ``nu``."""
    return sum(nu)


def _check_common_dimension(indices: Sequence[MultiIndex]) -> int:
    dims = {len(nu) for nu in indices}
    if len(dims) > 1:
        raise DimensionMismatchError(f"mixed multi-index dimensions: {sorted(dims)}")
    return dims.pop()


def immediate_predecessors(nu: MultiIndex) -> Iterator[MultiIndex]:
    """Yield the indices obtained by lowering one entry of ``nu`` by one."""
    for j, e in enumerate(nu):
        if e > 0:
            yield nu[:j] + (e - 1,) + nu[j + 1 :]


def is_downward_closed(indices: Iterable[MultiIndex]) -> bool:
    """Check whether a set of multi-indices is downward closed.

    It suffices to verify that each member's immediate predecessors are
    present: any smaller index is reachable through a chain of them.
    """
    index_set = {as_multiindex(nu) for nu in indices}
    if not index_set:
        return True
    _check_common_dimension(tuple(index_set))
    for nu in index_set:
        for mu in immediate_predecessors(nu):
            if mu not in index_set:
                return False
    return True


def _level_indices(d: int, level: int) -> list[MultiIndex]:
    """All d-dimensional indices of total degree ``level``, in canonical order.

    Within a total-degree level indices are sorted reverse-lexicographically
    (compare exponent tuples from the last coordinate), which for d = 2 puts
    the first coordinate in descending order: (2,0), (1,1), (0,2).
    """
    out: list[MultiIndex] = []

    def fill(prefix: tuple[int, ...], remaining: int, slots: int) -> None:
        if slots == 1:
            out.append(prefix + (remaining,))
            return
        for e in range(remaining + 1):
            fill(prefix + (e,), remaining - e, slots - 1)

    fill((), level, d)
    out.sort(key=lambda nu: nu[::-1])
    return out


def canonical_sequence(d: int, count: int) -> list[MultiIndex]:
    """First ``count`` indices of the canonical graded sequence in dimension d.

    Indices are ordered by increasing total degree; the degree sum only
    increases once all combinations at the current sum have been listed.
    Every prefix of the sequence is downward closed, so the sequence can be
    used to grow hierarchical index sets one index at a time.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    seq: list[MultiIndex] = []
    level = 0
    while len(seq) < count:
        seq.extend(_level_indices(d, level))
        level += 1
    return seq[:count]


class DownwardClosedSet:
    """An ordered downward-closed set of multi-indices.

    The stored order must be a linear extension of the componentwise partial
    order, so every proper prefix of the sequence is itself downward closed.
    This is what makes the set usable as a hierarchy: interpolants built on a
    prefix stay valid when the set grows.
    """

    def __init__(self, indices: Iterable[Iterable[int]]):
        seq = [as_multiindex(nu) for nu in indices]
        if not seq:
            raise ValueError("index set must be non-empty")
        self.dim = _check_common_dimension(seq)
        seen: set[MultiIndex] = set()
        for pos, nu in enumerate(seq):
            if nu in seen:
                raise ValueError(f"duplicate multi-index {nu}")
            for mu in immediate_predecessors(nu):
                if mu not in seen:
                    raise NotDownwardClosedError(
                        f"index {nu} at position {pos} precedes its predecessor {mu}"
                    )
            seen.add(nu)
        self.indices: tuple[MultiIndex, ...] = tuple(seq)
        self._members = seen

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[MultiIndex]:
        return iter(self.indices)

    def __getitem__(self, i: int) -> MultiIndex:
        return self.indices[i]

    def __contains__(self, nu: object) -> bool:
        return nu in self._members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DownwardClosedSet):
            return NotImplemented
        return self.indices == other.indices

    def __repr__(self) -> str:
        return f"DownwardClosedSet({list(self.indices)!r})"

    def max_exponents(self) -> MultiIndex:
        """Componentwise maximum over the member indices."""
        return tuple(max(nu[j] for nu in self.indices) for j in range(self.dim))

    def extended(self, extra: Iterable[Iterable[int]]) -> "DownwardClosedSet":
        """New set with ``extra`` appended; the union must stay downward closed."""
        extra_seq = [as_multiindex(nu) for nu in extra]
        for nu in extra_seq:
            if nu in self._members:
                raise ValueError(f"index {nu} already present")
        return DownwardClosedSet(list(self.indices) + extra_seq)


def format_indices(indices: Iterable[MultiIndex]) -> str:
    """Serialize a multi-index sequence as comma-separated tuples, one per line."""
    return "\n".join(",".join(str(e) for e in nu) for nu in indices)


def parse_indices(text: str) -> list[MultiIndex]:
    """Inverse of :func:`format_indices`; blank lines are skipped."""
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line:
            out.append(as_multiindex(int(tok) for tok in line.split(",")))
    return out
