"""Direct linearizability checking with replayable certificates.

``linearize`` searches for an extension H' (H plus appended responses for
some pending calls) and a legal sequential S that is equivalent to
complete(H') and respects its call precedence. ``verify_certificate``
re-checks a certificate without any search.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Optional

from .history import (
    RESP,
    Event,
    History,
    complete_of,
    difference,
    equivalent,
    is_complete,
    is_sequential,
    is_subhistory,
    is_well_formed,
)
from .specs import UnknownOperation, UnregisteredObject, is_legal, spec_for

STRENGTHENED = "strengthened"
CLASSIC = "classic"
MODES = (STRENGTHENED, CLASSIC)
DEFAULT_BUDGET = 10**6

# Verification conditions, in reporting order.
L1 = "L1"
L2_EQUIV = "L2-equiv"
L2_LEGAL = "L2-legal"
L3 = "L3"
CONDITIONS = (L1, L2_EQUIV, L2_LEGAL, L3)


class NotLinearizable(Exception):
    def __init__(self, completions=0, states=0, obj=None):
        self.completions = completions
        self.states = states
        self.obj = obj
        where = f" (object {obj})" if obj is not None else ""
        super().__init__(
            f"not linearizable{where}: {completions} completions, {states} states explored"
        )


class BudgetExceeded(Exception):
    def __init__(self, limit):
        super().__init__(f"search budget of {limit} states exhausted")
        self.limit = limit


@dataclass(frozen=True)
class LinearizationCertificate:
    extension: History
    linearization: History
    mode: str = STRENGTHENED
    completed_pending: frozenset = frozenset()
    objects: dict = field(default_factory=dict, compare=False)
    stats: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Violation:
    condition: str
    detail: str


@dataclass
class VerificationReport:
    violations: list = field(default_factory=list)

    def __bool__(self):
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def conditions(self) -> set:
        return {v.condition for v in self.violations}

    @property
    def first(self) -> Optional[str]:
        for c in CONDITIONS:
            if c in self.conditions:
                return c
        return None

    def add(self, condition, detail):
        self.violations.append(Violation(condition, detail))


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


class _Counter:
    def __init__(self, limit):
        self.limit = limit
        self.states = 0

    def tick(self):
        self.states += 1
        if self.limit is not None and self.states > self.limit:
            raise BudgetExceeded(self.limit)


def linearize(
    h: History,
    reg: Mapping,
    mode: str = STRENGTHENED,
    budget: Optional[int] = DEFAULT_BUDGET,
) -> LinearizationCertificate:
    """Find a certificate for ``h`` or raise ``NotLinearizable``.

    Pending subsets are tried by increasing size; within one completion the
    search only schedules calls whose invocation is not preceded by the
    response of another unscheduled call, memoizing failed
    (spec states, remaining calls) pairs.
    """
    _check_mode(mode)
    objects = h.objects
    specs = [spec_for(reg, o) for o in objects]
    objs = {o: i for i, o in enumerate(objects)}
    complete = list(h.complete_calls())
    pending = list(h.pending_calls())
    counter = _Counter(budget)
    completions = 0
    for k in range(len(pending) + 1):
        for subset in combinations(pending, k):
            completions += 1
            calls = complete + list(subset)
            ranked = sorted(calls, key=lambda m: h.index_of(m.inv))
            synth = {m.id for m in subset}
            found = _search(h, ranked, synth, specs, objs, counter)
            if found is not None:
                cert = _certificate(h, ranked, found, synth, mode)
                cert.stats.update(states=counter.states, completions=completions)
                return cert
    raise NotLinearizable(completions, counter.states)


def _search(h, calls, synth, specs, objs, counter):
    """Depth-first search for a legal order of ``calls`` (sorted by invocation).

    Calls in ``synth`` are pending calls being completed: their response goes
    after every event of ``h`` and its payload is whatever the object specification returns.
    Returns a list of (call index, result) or None.
    """
    n = len(calls)
    inv_pos = [h.index_of(m.inv) for m in calls]
    resp_pos = []
    extra = len(h)
    for m in calls:
        if m.id in synth:
            resp_pos.append(extra)
            extra += 1
        else:
            resp_pos.append(h.index_of(m.resp))
    obj_ix = [objs[m.obj] for m in calls]
    is_synth = [m.id in synth for m in calls]
    failed = set()

    def dfs(states, remaining):
        if not remaining:
            return []
        key = (states, remaining)
        if key in failed:
            return None
        counter.tick()
        bound = min(resp_pos[i] for i in range(n) if remaining >> i & 1)
        for i in range(n):
            if not remaining >> i & 1:
                continue
            if inv_pos[i] > bound:
                break
            m = calls[i]
            k = obj_ix[i]
            out = specs[k].apply(states[k], m.op, m.args)
            if out is None:
                continue
            nxt, res = out
            if not is_synth[i] and res != m.result:
                continue
            tail = dfs(states[:k] + (nxt,) + states[k + 1:], remaining & ~(1 << i))
            if tail is not None:
                return [(i, res)] + tail
        failed.add(key)
        return None

    return dfs(tuple(s.initial for s in specs), (1 << n) - 1)


def _certificate(h, calls, found, synth, mode):
    s_events = []
    appended = []
    for i, res in found:
        m = calls[i]
        if m.id in synth:
            r = Event(RESP, m.proc, m.inv.seq, m.obj, m.op, res)
            appended.append(r)
        else:
            r = m.resp
        s_events.extend((m.inv, r))
    appended.sort(key=lambda e: e.call_id)
    ext = History(h.events + tuple(appended), h.meta)
    return LinearizationCertificate(
        extension=ext,
        linearization=History(tuple(s_events), h.meta),
        mode=mode,
        completed_pending=frozenset(synth),
    )


def is_linearizable(h, reg, mode=STRENGTHENED, budget=DEFAULT_BUDGET) -> bool:
    try:
        linearize(h, reg, mode, budget)
    except NotLinearizable:
        return False
    return True


def precedence_pairs(h: History, among=None) -> set:
    """Pairs of call ids (m, m') with resp(m) before inv(m') in ``h``."""
    calls = h.calls()
    if among is not None:
        calls = [m for m in calls if m.id in among]
    pairs = set()
    for m in calls:
        if m.resp is None:
            continue
        rp = h.index_of(m.resp)
        for mp in calls:
            if mp is not m and rp < h.index_of(mp.inv):
                pairs.add((m.id, mp.id))
    return pairs


def verify_certificate(
    h: History, cert: LinearizationCertificate, reg: Optional[Mapping] = None
) -> VerificationReport:
    """Replay every linearizability condition on ``cert`` for ``h``.

    Without ``reg`` the legality half of L2 is skipped.
    """
    report = VerificationReport()
    ext, s = cert.extension, cert.linearization
    _check_mode(cert.mode)

    if not is_well_formed(ext.events):
        report.add(L1, "extension is not a well-formed history")
    elif not is_subhistory(h, ext):
        report.add(L1, "history is not a subhistory of the extension")
    else:
        added = [e for e in difference(ext, h).events if e.is_inv]
        if added:
            report.add(L1, f"extension adds invocation {added[0]}")

    completed = complete_of(ext)
    if not equivalent(completed, s):
        report.add(L2_EQUIV, "linearization is not equivalent to complete(extension)")

    if not (is_well_formed(s.events) and is_sequential(s) and is_complete(s)):
        report.add(L2_LEGAL, "linearization is not a sequential complete history")
    elif reg is not None:
        try:
            legal = is_legal(s, reg)
        except (UnregisteredObject, UnknownOperation) as exc:
            report.add(L2_LEGAL, f"cannot evaluate legality: {exc!r}")
        else:
            if not legal:
                report.add(L2_LEGAL, "linearization violates a sequential specification")

    if cert.mode == STRENGTHENED:
        premise = precedence_pairs(completed)
    else:
        premise = precedence_pairs(h)
    s_pos = {}
    for i, e in enumerate(s.events):
        if e.is_inv:
            s_pos.setdefault(e.call_id, i)
    for a, b in sorted(premise):
        if a in s_pos and b in s_pos and not s_pos[a] < s_pos[b]:
            report.add(L3, f"call {a} must precede call {b} in the linearization")
            break
    return report


def mode_relation_holds(h: History, cert: LinearizationCertificate) -> bool:
    """Precedence under H among the linearization's calls is contained in
    precedence under complete(H'). When it holds, a certificate valid in
    strengthened mode is also valid in classic mode."""
    ids = {m.id for m in cert.linearization.calls()}
    classic = precedence_pairs(h, ids)
    strong = precedence_pairs(complete_of(cert.extension), ids)
    return classic <= strong
