"""Acceptance gate: seven criteria, each checked against an independent
oracle at the stated size. Every criterion records a one-line pass/fail
summary which conftest prints after the run. Run standalone with

    python3 tests/test_acceptance.py
"""

import os
import random
import sys
import time
from dataclasses import replace
from itertools import combinations

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import networkx as nx  # noqa: E402

from lincheck.checker import (  # noqa: E402
    CLASSIC,
    STRENGTHENED,
    BudgetExceeded,
    NotLinearizable,
    linearize,
    verify_certificate,
)
from lincheck.compose import (  # noqa: E402
    ObjectCertificateSet,
    check_compositional,
    check_objects,
    compose,
    project_certificate,
)
from lincheck.generate import INJECTIONS, Injection, generate, random_config  # noqa: E402
from lincheck.history import (  # noqa: E402
    INV,
    RESP,
    Event,
    History,
    complete_of,
    difference,
    equivalent,
    is_complete,
    method_precedes,
    project_object,
    project_process,
    sequential_from_calls,
)
from lincheck.order import CyclicCausality, build_causality, extend_to_well_order, verify_extension  # noqa: E402
from lincheck.specs import make_registry  # noqa: E402

import _oracle  # noqa: E402
from _strategies import (  # noqa: E402
    per_process_prefix,
    random_causality_input,
    random_history,
    reinterleave,
    respond_some,
)

RESULTS = {}
MAX_FAILURES_SHOWN = 3


def record(n, title, failures, detail):
    ok = not failures
    line = f"criterion {n} [{title}]: {'PASS' if ok else 'FAIL'} ({detail})"
    if failures:
        line += "; e.g. " + " | ".join(map(str, failures[:MAX_FAILURES_SHOWN]))
    RESULTS[n] = (ok, line)
    return ok, line


# ---------------------------------------------------------------- criterion 1

SMALL_NAMES = {"r": "register", "q": "fifo-queue"}
SMALL_REG = make_registry(SMALL_NAMES)
SMALL_INVS = [("r", "write", ("1",)), ("r", "read", ()), ("q", "enq", ("x",)), ("q", "deq", ())]
SMALL_RESULTS = {"write": [("ok",)], "read": [("0",), ("1",)],
                 "enq": [("ok",)], "deq": [("x",), ("empty",)]}


def enumerate_small(max_events=6, procs=(1, 2)):
    """Every well-formed history over two processes, a register written
    with 1 and a queue fed x, results from each operation's legal set."""
    def rec(events, open_calls, seqs):
        yield History(tuple(events))
        if len(events) == max_events:
            return
        for p in procs:
            if p in open_calls:
                o, op, _ = open_calls[p]
                rest = {k: v for k, v in open_calls.items() if k != p}
                for res in SMALL_RESULTS[op]:
                    yield from rec(events + [Event(RESP, p, seqs[p], o, op, res)], rest, seqs)
            else:
                s = dict(seqs)
                s[p] = s.get(p, 0) + 1
                for call in SMALL_INVS:
                    o, op, args = call
                    yield from rec(events + [Event(INV, p, s[p], o, op, args)],
                                   {**open_calls, p: call}, s)
    yield from rec([], {}, {})


def compositional_cert(h, reg, mode=STRENGTHENED):
    results = check_objects(h, reg, mode)
    if any(isinstance(r, NotLinearizable) for r in results.values()):
        return None, results
    return compose(ObjectCertificateSet(h, results, reg), mode), results


_SMALL_CERTS = []


def criterion_1():
    failures = []
    total = linearizable = 0
    _SMALL_CERTS.clear()
    for h in enumerate_small():
        total += 1
        try:
            direct = linearize(h, SMALL_REG)
        except NotLinearizable:
            direct = None
        comp, _ = compositional_cert(h, SMALL_REG)
        oracle = _oracle.brute_linearizable(h.events, SMALL_NAMES)
        if (direct is not None) != (comp is not None) or (direct is not None) != oracle:
            failures.append(f"{h}: direct={direct is not None} comp={comp is not None} oracle={oracle}")
            continue
        if direct is not None:
            linearizable += 1
            if not verify_certificate(h, direct, SMALL_REG) or not verify_certificate(h, comp, SMALL_REG):
                failures.append(f"{h}: certificate fails replay")
            _SMALL_CERTS.append((h, direct))
            _SMALL_CERTS.append((h, comp))
    return record(1, "direct == compositional, exhaustive", failures,
                  f"{total} histories, {linearizable} linearizable, "
                  f"{len(failures)} disagreements")


# ---------------------------------------------------------------- criterion 2

def criterion_2(n=10_000):
    rng = random.Random(20_2)
    failures = []
    done = 0
    while done < n:
        cfg = random_config(rng, max_procs=3, max_objects=3, max_events=12, pending_prob=0.2)
        h = generate(cfg)
        reg = cfg.registry()
        subs = check_objects(h, reg)
        if any(isinstance(r, NotLinearizable) for r in subs.values()):
            continue
        done += 1
        cert = compose(ObjectCertificateSet(h, subs, reg))
        report = verify_certificate(h, cert, reg)
        if not report:
            failures.append(f"seed {cfg.seed}: {report.first}")
            continue
        for o, sub in subs.items():
            if project_object(cert.linearization, o) != sub.linearization:
                failures.append(f"seed {cfg.seed}: S|{o} != S_{o}")
            if project_object(cert.extension, o) != sub.extension:
                failures.append(f"seed {cfg.seed}: H'|{o} != (H|{o})'")
    return record(2, "merge soundness", failures,
                  f"{n - len({f.split(':')[0] for f in failures})}/{n} composed certificates verify "
                  f"with exact projections")


# ---------------------------------------------------------------- criterion 3

def criterion_3():
    if not _SMALL_CERTS:
        criterion_1()
    failures = []
    checked = 0
    for h, cert in _SMALL_CERTS:
        for o in ("r", "q"):
            checked += 1
            sub = project_certificate(cert, o)
            report = verify_certificate(project_object(h, o), sub, SMALL_REG)
            if not report:
                failures.append(f"{h} on {o}: {report.first}")
    return record(3, "projection direction", failures,
                  f"{checked} object projections of {len(_SMALL_CERTS)} certificates, "
                  f"{len(failures)} failures")


# ---------------------------------------------------------------- criterion 4

def _events_equal(h, g):
    return list(h.events) == list(g.events)


def prop_equality_via_events(rng, h):
    g = reinterleave(rng, h) if rng.random() < 0.7 else History(h.events)
    same_carrier_and_order = (
        {e.key for e in h.events} == {e.key for e in g.events}
        and all(h.index_of(e) == g.index_of(e) for e in h.events if e in g)
    )
    return (h == g) == _events_equal(h, g) == (same_carrier_and_order and len(h) == len(g))


def prop_sequential_equality_via_calls(rng, h):
    calls = list(complete_of(h).complete_calls())
    a = rng.sample(calls, len(calls))
    b = a if rng.random() < 0.5 else rng.sample(calls, len(calls))
    s, t = sequential_from_calls(a), sequential_from_calls(b)
    return (s == t) == ([m.id for m in a] == [m.id for m in b])


def prop_complete_idempotent(rng, h):
    c = complete_of(h)
    return is_complete(c) and complete_of(c) == c and list(c.events) == _oracle.completed(list(h.events))


def prop_projections_of_complete(rng, h):
    c = complete_of(h)
    return (all(is_complete(project_process(c, p)) for p in c.procs)
            and all(is_complete(project_object(c, o)) for o in c.objects))


def prop_equivalence_same_calls(rng, h):
    g = reinterleave(rng, h)
    return equivalent(h, g) and {m.id for m in h.calls()} == {m.id for m in g.calls()} \
        and set(h.calls()) == set(g.calls())


def prop_subhistory_order(rng, h):
    g = per_process_prefix(rng, h)
    ev = list(g.events)
    for e, f in combinations(ev, 2):
        if g.precedes(e, f) != h.precedes(e, f) or g.precedes(f, e) != h.precedes(f, e):
            return False
    gc = g.complete_calls()
    for m in gc:
        for mp in g.calls():
            if m is not mp and method_precedes(g, m, mp) != method_precedes(h, h.call(m.id), h.call(mp.id)):
                return False
    return True


def prop_difference_projection(rng, h):
    hp = respond_some(rng, h)
    d = difference(hp, h)
    for p in set(h.procs) | set(hp.procs):
        if project_process(d, p) != difference(project_process(hp, p), project_process(h, p)):
            return False
    for o in set(h.objects) | set(hp.objects):
        if project_object(d, o) != difference(project_object(hp, o), project_object(h, o)):
            return False
    return True


def prop_invocation_order_under_extension(rng, h):
    hp = respond_some(rng, h)
    if {e.key for e in h.events if e.is_inv} != {e.key for e in hp.events if e.is_inv}:
        return False
    views = [h, complete_of(h), hp, complete_of(hp)]
    invs = [e for e in h.events if e.is_inv]
    for e, f in combinations(invs, 2):
        orders = {v.index_of(e) < v.index_of(f) for v in views if e in v and f in v}
        if len(orders) != 1:
            return False
    for m in h.complete_calls():
        for mp in h.calls():
            if m is not mp and method_precedes(h, m, mp) \
                    and not method_precedes(hp, hp.call(m.id), hp.call(mp.id)):
                return False
    return True


def prop_projections_commute(rng, h):
    return all(project_process(project_object(h, o), p) == project_object(project_process(h, p), o)
               for o in h.objects for p in h.procs)


def prop_complete_commutes_with_object(rng, h):
    return all(complete_of(project_object(h, o)) == project_object(complete_of(h), o)
               for o in h.objects)


PROPOSITIONS = [
    ("equality via events", prop_equality_via_events),
    ("sequential-complete equality via calls", prop_sequential_equality_via_calls),
    ("complete idempotence", prop_complete_idempotent),
    ("projections of complete are complete", prop_projections_of_complete),
    ("equivalence implies same call set", prop_equivalence_same_calls),
    ("order preserved under subhistory", prop_subhistory_order),
    ("difference commutes with projection", prop_difference_projection),
    ("invocation order under response-only extension", prop_invocation_order_under_extension),
    ("(H|o)|p == (H|p)|o", prop_projections_commute),
    ("complete(H|o) == complete(H)|o", prop_complete_commutes_with_object),
]


def criterion_4(n=1000):
    failures = []
    for i, (name, prop) in enumerate(PROPOSITIONS):
        rng = random.Random(400 + i)
        for k in range(n):
            h = random_history(rng, rng.randint(0, 16))
            if not prop(rng, h):
                failures.append(f"{name} on {h}")
    return record(4, "history propositions", failures,
                  f"{len(PROPOSITIONS)} properties x {n} histories, {len(failures)} failures")


# ---------------------------------------------------------------- criterion 5

def _graph(c, extra=()):
    g = nx.DiGraph()
    g.add_nodes_from(c.carrier)
    g.add_edges_from(c.edges())
    g.add_edges_from(extra)
    return g


def _cyclic_input(rng):
    """An acyclic input plus one message edge from a send invocation back to a
    receive response that already causes it."""
    while True:
        chains, msgs = random_causality_input(
            rng, rng.randint(10, 100), rng.randint(1, 5), rng.randint(0, 19))
        c = build_causality(chains, msgs)
        events = [e for ch in chains.values() for e in ch]
        sends = [e for e in events if e.is_inv and e.op == "send"]
        recvs = [e for e in events if not e.is_inv and e.op == "receive"]
        back = [(s, r) for s in sends for r in recvs if c.precedes(r.key, s.key)]
        if back:
            return chains, msgs + [rng.choice(back)]


def criterion_5(n_acyclic=1000, n_cyclic=100):
    rng = random.Random(505)
    failures = []
    for _ in range(n_acyclic):
        chains, msgs = random_causality_input(
            rng, rng.randint(0, 100), rng.randint(1, 5), rng.randint(0, 20))
        assert sum(map(len, chains.values())) <= 100 and len(msgs) <= 20
        try:
            c = build_causality(chains, msgs)
        except CyclicCausality as exc:
            failures.append(f"acyclic input rejected: {exc}")
            continue
        g = _graph(c)
        if not nx.is_directed_acyclic_graph(g):
            failures.append("oracle disagrees on acyclicity")
        w = extend_to_well_order(c)
        if not verify_extension(c, w):
            failures.append("extension misses an edge")
        pos = {k: i for i, k in enumerate(w)}
        if not all(pos[a] < pos[b] for a in g for b in nx.descendants(g, a)):
            failures.append("extension misses a closure pair")
        for p, ch in chains.items():
            if [k for k in w if k[0] == p] != [e.key for e in ch]:
                failures.append(f"chain {p} not preserved")
    for _ in range(n_cyclic):
        chains, msgs = _cyclic_input(rng)
        try:
            build_causality(chains, msgs)
        except CyclicCausality as exc:
            cyc = exc.cycle
            edges = {(e.key, f.key) for ch in chains.values() for e, f in zip(ch, ch[1:])}
            edges |= {(s.key, r.key) for s, r in msgs}
            edges |= {(e.key, (e.proc, e.seq, RESP)) for ch in chains.values() for e in ch if e.is_inv}
            g = nx.DiGraph(list(edges))
            if nx.is_directed_acyclic_graph(g):
                failures.append("oracle finds no cycle")
            if len(cyc) < 2 or cyc[0] != cyc[-1] or not all(e in edges for e in zip(cyc, cyc[1:])):
                failures.append(f"invalid witness {cyc}")
        else:
            failures.append("cyclic input accepted")
    return record(5, "well-order extension", failures,
                  f"{n_acyclic} acyclic + {n_cyclic} cyclic inputs, "
                  f"{len(failures)} misclassifications")


# ---------------------------------------------------------------- criterion 6

def _flip(rng, e, menu):
    choices = [v for v in menu if (v,) != e.payload]
    return replace(e, payload=(rng.choice(choices),))


MUTATIONS = ("swap", "delete", "flip")


def mutate(rng, kind, cert, h):
    """Apply one mutation: swap two calls in S, delete an appended response,
    or flip a payload in S or H'. Returns None when ``cert`` has nothing to
    mutate in that way."""
    ext, s = cert.extension, cert.linearization
    if kind == "swap":
        calls = list(s.calls())
        if len(calls) < 2:
            return None
        i, j = rng.sample(range(len(calls)), 2)
        calls[i], calls[j] = calls[j], calls[i]
        return replace(cert, linearization=sequential_from_calls(calls))
    if kind == "delete":
        appended = [e for e in ext.events if e not in h]
        if not appended:
            return None
        gone = rng.choice(appended)
        return replace(cert, extension=History(tuple(e for e in ext.events if e != gone)))
    menu = ["0", "1", "2", "ok", "empty", "x", "q1.1", "q2.1", "s1.1", "s2.1"]
    target = "linearization" if rng.random() < 0.5 else "extension"
    ev = list(getattr(cert, target).events)
    if not ev:
        return None
    i = rng.randrange(len(ev))
    ev[i] = _flip(rng, ev[i], menu)
    return replace(cert, **{target: History(tuple(ev))})


def criterion_6(n=1000):
    rng = random.Random(606)
    failures = []
    rejected = valid = 0
    by_kind = {}
    done = 0
    while done < n:
        cfg = random_config(rng, max_procs=3, max_objects=2, max_events=10, pending_prob=0.4)
        h = generate(cfg)
        reg = cfg.registry()
        mode = rng.choice((STRENGTHENED, CLASSIC))
        cert = linearize(h, reg, mode) if rng.random() < 0.5 else check_compositional(h, reg, mode)
        kind = MUTATIONS[done % len(MUTATIONS)]
        mutant = mutate(rng, kind, cert, h)
        if mutant is None:
            continue
        done += 1
        by_kind[kind] = by_kind.get(kind, 0) + 1
        got = verify_certificate(h, mutant, reg).conditions
        want = _oracle.violated(h.events, mutant.extension.events, mutant.linearization.events,
                                dict(cfg.objects), mode)
        if got != want:
            failures.append(f"seed {cfg.seed} {kind}: verify={sorted(got)} oracle={sorted(want)}")
        if want:
            rejected += bool(got)
        else:
            valid += 1
    kinds = ", ".join(f"{k}={v}" for k, v in sorted(by_kind.items()))
    return record(6, "certificate tamper fuzzing", failures,
                  f"{n} mutants ({kinds}); {rejected} invalid mutants rejected, "
                  f"{valid} mutants still valid; {len(failures)} condition mismatches")


# ---------------------------------------------------------------- criterion 7

def _verdicts(h, reg):
    direct = True
    try:
        linearize(h, reg)
    except NotLinearizable:
        direct = False
    comp = True
    try:
        check_compositional(h, reg)
    except NotLinearizable:
        comp = False
    return direct, comp


def criterion_7(n=500):
    rng = random.Random(707)
    failures = []
    kinds = sorted(INJECTIONS)
    for i in range(n):
        cfg = random_config(rng, pending_prob=0.2, inject=Injection(kinds[i % len(kinds)]))
        try:
            verdicts = _verdicts(generate(cfg), cfg.registry())
        except BudgetExceeded:
            failures.append(f"seed {cfg.seed}: budget exceeded")
            continue
        if verdicts != (False, False):
            failures.append(f"injected seed {cfg.seed} ({cfg.inject.kind}): {verdicts}")
    for _ in range(n):
        cfg = random_config(rng, pending_prob=0.2)
        try:
            verdicts = _verdicts(generate(cfg), cfg.registry())
        except BudgetExceeded:
            failures.append(f"seed {cfg.seed}: budget exceeded")
            continue
        if verdicts != (True, True):
            failures.append(f"clean seed {cfg.seed}: {verdicts}")
    return record(7, "injected-violation detection", failures,
                  f"{n} injected + {n} clean traces, {len(failures)} wrong verdicts")


# -------------------------------------------------------------------- pytest

def _check(fn):
    ok, line = fn()
    assert ok, line


def test_criterion_1_exhaustive_equivalence():
    _check(criterion_1)


def test_criterion_2_merge_soundness():
    _check(criterion_2)


def test_criterion_3_projection_direction():
    _check(criterion_3)


def test_criterion_4_propositions():
    _check(criterion_4)


def test_criterion_5_well_order_extension():
    _check(criterion_5)


def test_criterion_6_tamper_fuzzing():
    _check(criterion_6)


def test_criterion_7_injected_violations():
    _check(criterion_7)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


if __name__ == "__main__":
    all_ok = True
    for fn in CRITERIA:
        start = time.perf_counter()
        ok, line = fn()
        all_ok &= ok
        print(f"{line} [{time.perf_counter() - start:.1f}s]", flush=True)
    sys.exit(0 if all_ok else 1)
