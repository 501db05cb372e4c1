"""Events, method calls and histories.

A history is a finite sequence of invocation and response events whose
sequence position is the well ordering. All operations here are pure and
return new ``History`` values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

INV = "inv"
RESP = "resp"


class ValidationError(ValueError):
    """Raised when a raw event sequence is not a history."""


class NotWellFormed(ValidationError):
    def __init__(self, index: int, rule: str):
        super().__init__(f"event {index}: not well-formed ({rule})")
        self.index = index
        self.rule = rule


class DuplicateEvent(ValidationError):
    def __init__(self, index: int):
        super().__init__(f"event {index}: duplicate (proc, seq, kind)")
        self.index = index


class NotASubhistory(ValueError):
    pass


class CallNotInHistory(KeyError):
    pass


@dataclass(frozen=True)
class Event:
    kind: str
    proc: int
    seq: int
    obj: str
    op: str
    payload: tuple = ()

    def __post_init__(self):
        if self.kind not in (INV, RESP):
            raise ValueError(f"bad event kind {self.kind!r}")
        if self.proc < 1 or self.seq < 1:
            raise ValueError("proc and seq are 1-based")
        object.__setattr__(self, "payload", tuple(str(v) for v in self.payload))

    @property
    def key(self) -> tuple:
        return (self.proc, self.seq, self.kind)

    @property
    def call_id(self) -> tuple:
        return (self.proc, self.seq)

    @property
    def is_inv(self) -> bool:
        return self.kind == INV

    def matches(self, other: "Event") -> bool:
        """True when one is the invocation and the other the response of the same call."""
        return (
            self.kind != other.kind
            and self.proc == other.proc
            and self.seq == other.seq
            and self.obj == other.obj
            and self.op == other.op
        )

    def __str__(self):
        args = ",".join(self.payload)
        return f"{self.kind}<p{self.proc},c{self.seq},{self.obj},{self.op},[{args}]>"


def inv(proc, seq, obj, op, *args) -> Event:
    return Event(INV, proc, seq, obj, op, args)


def resp(proc, seq, obj, op, *results) -> Event:
    return Event(RESP, proc, seq, obj, op, results)


@dataclass(frozen=True)
class MethodCall:
    inv: Event
    resp: Optional[Event] = None

    def __post_init__(self):
        if not self.inv.is_inv:
            raise ValueError("MethodCall.inv must be an invocation")
        if self.resp is not None and not self.inv.matches(self.resp):
            raise ValueError(f"{self.resp} does not match {self.inv}")

    @property
    def id(self) -> tuple:
        return self.inv.call_id

    @property
    def proc(self) -> int:
        return self.inv.proc

    @property
    def obj(self) -> str:
        return self.inv.obj

    @property
    def op(self) -> str:
        return self.inv.op

    @property
    def args(self) -> tuple:
        return self.inv.payload

    @property
    def result(self) -> Optional[tuple]:
        return None if self.resp is None else self.resp.payload

    @property
    def pending(self) -> bool:
        return self.resp is None

    def __str__(self):
        res = "?" if self.resp is None else ",".join(self.resp.payload)
        return f"p{self.proc}.{self.obj}.{self.op}({','.join(self.args)})->{res}"


@dataclass(frozen=True)
class History:
    """A finite well-ordered event structure. Position in ``events`` is the order."""

    events: tuple = ()
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __contains__(self, item):
        if isinstance(item, Event):
            pos = self.position.get(item.key)
            return pos is not None and self.events[pos] == item
        if isinstance(item, MethodCall):
            return self.has_call(item)
        return False

    @cached_property
    def position(self) -> dict:
        return {e.key: i for i, e in enumerate(self.events)}

    @cached_property
    def _calls(self) -> tuple:
        responses = {e.call_id: e for e in self.events if not e.is_inv}
        calls = []
        for e in self.events:
            if e.is_inv:
                r = responses.get(e.call_id)
                calls.append(MethodCall(e, r if r is not None and e.matches(r) else None))
        return tuple(calls)

    def calls(self) -> tuple:
        """Method calls in invocation order; pending ones included."""
        return self._calls

    def complete_calls(self) -> tuple:
        return tuple(m for m in self._calls if not m.pending)

    def pending_calls(self) -> tuple:
        return tuple(m for m in self._calls if m.pending)

    @cached_property
    def _by_id(self) -> dict:
        return {m.id: m for m in self._calls}

    def call(self, call_id) -> MethodCall:
        try:
            return self._by_id[tuple(call_id)]
        except KeyError:
            raise CallNotInHistory(call_id) from None

    def has_call(self, m: MethodCall) -> bool:
        """Membership of a complete call: both of its events belong to the history."""
        if m.resp is None:
            return False
        return m.inv in self and m.resp in self

    @property
    def procs(self) -> list:
        return sorted({e.proc for e in self.events})

    @property
    def objects(self) -> list:
        return sorted({e.obj for e in self.events})

    def index_of(self, e: Event) -> int:
        return self.position[e.key]

    def precedes(self, e: Event, f: Event) -> bool:
        return self.position[e.key] < self.position[f.key]

    def _sub(self, events: Iterable[Event]) -> "History":
        return History(tuple(events), self.meta)

    def __str__(self):
        return "\n".join(str(e) for e in self.events)


def validate(events: Iterable[Event], meta: Optional[dict] = None) -> History:
    """Check that ``events`` form a history: no duplicate identities and
    every process subhistory alternates inv/resp with matching pairs."""
    events = tuple(events)
    seen = set()
    last = {}
    for i, e in enumerate(events):
        if e.key in seen:
            raise DuplicateEvent(i)
        seen.add(e.key)
        prev = last.get(e.proc)
        if prev is None:
            if not e.is_inv:
                raise NotWellFormed(i, "first-event-not-invocation")
        elif prev.is_inv:
            if e.is_inv:
                raise NotWellFormed(i, "inv-after-inv")
            if not prev.matches(e):
                raise NotWellFormed(i, "mismatched-response")
        elif not e.is_inv:
            raise NotWellFormed(i, "resp-after-resp")
        last[e.proc] = e
    return History(events, dict(meta or {}))


def is_well_formed(events: Iterable[Event]) -> bool:
    try:
        validate(events)
    except ValidationError:
        return False
    return True


def project_process(h: History, p: int) -> History:
    return h._sub(e for e in h.events if e.proc == p)


def project_object(h: History, o: str) -> History:
    return h._sub(e for e in h.events if e.obj == o)


def complete_of(h: History) -> History:
    """Drop every pending invocation."""
    answered = {e.call_id for e in h.events if not e.is_inv}
    return h._sub(e for e in h.events if not e.is_inv or e.call_id in answered)


def is_complete(h: History) -> bool:
    return not h.pending_calls()


def is_sequential(h: History) -> bool:
    """Globally alternating inv/resp, each response matching the invocation just before it."""
    prev = None
    for e in h.events:
        if prev is None or not prev.is_inv:
            if not e.is_inv:
                return False
        elif e.is_inv or not prev.matches(e):
            return False
        prev = e
    return True


def is_subhistory(h: History, hp: History) -> bool:
    """H is contained in H' with its relative order preserved."""
    last = -1
    for e in h.events:
        pos = hp.position.get(e.key)
        if pos is None or hp.events[pos] != e or pos <= last:
            return False
        last = pos
    return True


def difference(hp: History, h: History) -> History:
    """Events of ``hp`` that are not in ``h``, in ``hp`` order."""
    if not is_subhistory(h, hp):
        raise NotASubhistory("second argument is not a subhistory of the first")
    keys = set(h.position)
    return hp._sub(e for e in hp.events if e.key not in keys)


def is_prefix(h: History, hp: History) -> bool:
    n = len(h)
    return len(hp) >= n and hp.events[:n] == h.events


def equivalent(h: History, hp: History) -> bool:
    procs = set(h.procs) | set(hp.procs)
    return all(
        project_process(h, p).events == project_process(hp, p).events for p in procs
    )


def method_precedes(h: History, m: MethodCall, mp: MethodCall) -> bool:
    """resp(m) comes before inv(mp) in ``h``. A pending ``m`` precedes nothing."""
    if m.inv not in h:
        raise CallNotInHistory(m.id)
    if mp.inv not in h:
        raise CallNotInHistory(mp.id)
    if m.resp is None or m.resp not in h:
        return False
    return h.precedes(m.resp, mp.inv)


def sequential_from_calls(calls: Iterable[MethodCall], meta: Optional[dict] = None) -> History:
    """Lay complete calls out back to back."""
    events = []
    for m in calls:
        if m.resp is None:
            raise ValueError(f"pending call {m} cannot appear in a sequential complete history")
        events.extend((m.inv, m.resp))
    return History(tuple(events), dict(meta or {}))
