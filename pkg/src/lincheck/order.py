"""Causality partial order on events and its extension to a total order.

Edges come from three sources: consecutive events of one process, an
invocation to its matching response, and message edges from the
invocation of a ``send`` call to the response of a ``receive`` call.
Finite inputs only; a topological order of a finite acyclic relation is
automatically a well ordering.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .history import Event

CLOSURE_LIMIT = 1000
SEND_OPS = ("send",)
RECEIVE_OPS = ("receive", "recv")


class CyclicCausality(ValueError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        path = " -> ".join(map(str, self.cycle))
        super().__init__(f"causality relation has a cycle: {path}")


class DanglingMessageEndpoint(ValueError):
    pass


class CarrierMismatch(ValueError):
    pass


@dataclass(frozen=True)
class CausalityOrder:
    """Event keys grouped into per-process chains plus extra cause/effect edges."""

    chains: dict
    extra_edges: frozenset = frozenset()
    _succ: dict = field(default_factory=dict, repr=False, compare=False)
    _closure: dict = field(default=None, repr=False, compare=False)

    @property
    def carrier(self) -> set:
        return {k for chain in self.chains.values() for k in chain}

    def edges(self) -> set:
        """Generating edges; the order is their transitive closure."""
        out = set(self.extra_edges)
        for chain in self.chains.values():
            out.update(zip(chain, chain[1:]))
        return out

    def precedes(self, a, b) -> bool:
        if self._closure is not None:
            return b in self._closure.get(a, ())
        return _reachable(self._succ, a, b)

    def closure_pairs(self) -> set:
        if self._closure is not None:
            return {(a, b) for a, bs in self._closure.items() for b in bs}
        return {(a, b) for a in self._succ for b in _descendants(self._succ, a)}


def _descendants(succ, a) -> set:
    seen = set()
    stack = list(succ.get(a, ()))
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(succ.get(x, ()))
    return seen


def _reachable(succ, a, b) -> bool:
    return b in _descendants(succ, a)


def _find_cycle(succ, nodes) -> list:
    """Return a closed path a -> ... -> a among ``nodes``."""
    color = {}
    for root in sorted(nodes):
        if root in color:
            continue
        path = [root]
        iters = [iter(sorted(succ.get(root, ())))]
        color[root] = 1
        while iters:
            nxt = next(iters[-1], None)
            if nxt is None:
                color[path.pop()] = 2
                iters.pop()
                continue
            if nxt not in nodes:
                continue
            state = color.get(nxt)
            if state == 1:
                return path[path.index(nxt):] + [nxt]
            if state is None:
                color[nxt] = 1
                path.append(nxt)
                iters.append(iter(sorted(succ.get(nxt, ()))))
    raise AssertionError("no cycle among the given nodes")


def _key(e):
    return e.key if isinstance(e, Event) else tuple(e)


def build_causality(
    chains: Mapping[int, Sequence[Event]],
    messages: Iterable[tuple] = (),
) -> CausalityOrder:
    """Build the causality order.

    ``chains`` maps a process index to its events in program order.
    ``messages`` holds ``(send_inv, recv_resp)`` pairs given as events or
    event keys. Raises ``CyclicCausality`` with a witness cycle if the
    generated relation is not a partial order.
    """
    events = {}
    key_chains = {}
    for p, chain in chains.items():
        ks = []
        for e in chain:
            if e.key in events:
                raise ValueError(f"event {e} appears in more than one chain")
            if e.proc != p:
                raise ValueError(f"event {e} listed under process {p}")
            events[e.key] = e
            ks.append(e.key)
        key_chains[p] = tuple(ks)

    extra = set()
    for inv_key, resp_key in _matching_pairs(events):
        extra.add((inv_key, resp_key))
    for src, dst in messages:
        src, dst = _key(src), _key(dst)
        for k in (src, dst):
            if k not in events:
                raise DanglingMessageEndpoint(f"message endpoint {k} not in any chain")
        s, r = events[src], events[dst]
        if not (s.is_inv and s.op in SEND_OPS):
            raise DanglingMessageEndpoint(f"{s} is not the invocation of a send call")
        if r.is_inv or r.op not in RECEIVE_OPS:
            raise DanglingMessageEndpoint(f"{r} is not the response of a receive call")
        extra.add((src, dst))

    c = CausalityOrder(key_chains, frozenset(extra))
    for a, b in c.edges():
        c._succ.setdefault(a, set()).add(b)
    # Kahn's algorithm doubles as the acyclicity check.
    _topological(c)
    if len(events) <= CLOSURE_LIMIT:
        closure = {}
        for a in _reverse_topological(c):
            reach = set()
            for b in c._succ.get(a, ()):
                reach.add(b)
                reach |= closure.get(b, set())
            closure[a] = reach
        object.__setattr__(c, "_closure", closure)
    return c


def _matching_pairs(events):
    for k, e in events.items():
        if e.is_inv:
            r = events.get((e.proc, e.seq, "resp"))
            if r is not None:
                yield k, r.key


def _reverse_topological(c):
    return reversed(_topological(c))


def _topological(c: CausalityOrder) -> list:
    """Source removal, always taking the ready event with the smallest
    (process, position-in-chain) key."""
    rank = {}
    for p, chain in c.chains.items():
        for i, k in enumerate(chain):
            rank[k] = (p, i)
    indeg = dict.fromkeys(rank, 0)
    for _, b in c.edges():
        indeg[b] += 1
    ready = [(rank[k], k) for k, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, k = heapq.heappop(ready)
        order.append(k)
        for b in c._succ.get(k, ()):
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(ready, (rank[b], b))
    if len(order) != len(rank):
        stuck = set(rank) - set(order)
        raise CyclicCausality(_find_cycle(c._succ, stuck))
    return order


def extend_to_well_order(c: CausalityOrder) -> list:
    """A total order (list of event keys) containing the causality order."""
    return _topological(c)


def verify_extension(c: CausalityOrder, witness: Sequence) -> bool:
    """Check ``witness`` is a permutation of the carrier respecting every edge."""
    witness = [_key(k) for k in witness]
    if len(set(witness)) != len(witness) or set(witness) != c.carrier:
        raise CarrierMismatch("witness is not a permutation of the carrier")
    pos = {k: i for i, k in enumerate(witness)}
    return all(pos[a] < pos[b] for a, b in c.edges())
