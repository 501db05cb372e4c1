"""Seeded random history generation.

Clean traces come from simulating atomic objects: each call takes effect
at a random instant between its invocation and response, so the output is
linearizable by construction. Injected violations are appended at the end
as a short sequential scenario that no linearization can explain.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .history import INV, RESP, Event, History, validate
from .specs import BUILTIN_SPECS, OK

# op name -> takes a fresh argument
GEN_OPS = {
    "register": (("write", True), ("read", False)),
    "fifo-queue": (("enq", True), ("deq", False)),
    "stack": (("push", True), ("pop", False)),
}

# kind -> (spec it targets, events appended)
INJECTIONS = {
    "stale-read": ("register", 4),
    "lost-update": ("register", 6),
    "reorder-dequeue": ("fifo-queue", 8),
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Injection:
    kind: str
    rate: float = 1.0


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    procs: int = 2
    objects: dict = field(default_factory=lambda: {"q": "fifo-queue"})
    max_events: int = 8
    pending_prob: float = 0.0
    inject: Optional[Injection] = None

    def check(self):
        if self.procs < 1:
            raise ConfigError("procs must be at least 1")
        if self.max_events < 0:
            raise ConfigError("max_events must be non-negative")
        if not 0.0 <= self.pending_prob <= 1.0:
            raise ConfigError("pending_prob must lie in [0, 1]")
        if not self.objects:
            raise ConfigError("at least one object is required")
        for o, spec in self.objects.items():
            if spec not in GEN_OPS:
                raise ConfigError(f"no generator for spec {spec!r} (object {o!r})")
        if self.inject is not None:
            if self.inject.kind not in INJECTIONS:
                raise ConfigError(f"unknown violation kind {self.inject.kind!r}")
            if not 0.0 <= self.inject.rate <= 1.0:
                raise ConfigError("injection rate must lie in [0, 1]")
            target, cost = INJECTIONS[self.inject.kind]
            if target not in self.objects.values():
                raise ConfigError(f"{self.inject.kind} needs a {target} object")
            if cost > self.max_events:
                raise ConfigError(f"{self.inject.kind} needs max_events >= {cost}")

    def registry(self) -> dict:
        return {o: BUILTIN_SPECS[s] for o, s in self.objects.items()}


class _Proc:
    def __init__(self, pid):
        self.pid = pid
        self.seq = 0
        self.calls_left = 0
        self.hangs = False
        self.call = None  # (obj, op, args)
        self.result = None
        self.state = "idle"  # idle | invoked | effected
        self.will_effect = True


def _allocate(rng, procs, budget):
    """Hand out calls until no further call fits in ``budget`` events."""
    used = 0

    def cost(p):
        return 2 if p.calls_left or not p.hangs else 1

    for p in procs:
        c = cost(p)
        if used + c <= budget:
            p.calls_left += 1
            used += c
    while used + 2 <= budget:
        rng.choice(procs).calls_left += 1
        used += 2


def generate(config: GenConfig) -> History:
    """Generate a well-formed history; identical configs give identical output."""
    config.check()
    rng = random.Random(config.seed)
    objects = sorted(config.objects)
    specs = {o: BUILTIN_SPECS[config.objects[o]] for o in objects}
    state = {o: specs[o].initial for o in objects}
    fresh = dict.fromkeys(objects, 0)

    procs = [_Proc(i + 1) for i in range(config.procs)]
    for p in procs:
        p.hangs = rng.random() < config.pending_prob

    inject = None
    budget = config.max_events
    if config.inject is not None and rng.random() < config.inject.rate:
        inject = config.inject.kind
        budget -= INJECTIONS[inject][1]
        rng.choice(procs).hangs = False
        if all(p.hangs for p in procs):
            raise AssertionError("injection needs an idle process")

    _allocate(rng, procs, budget)

    def next_value(o):
        fresh[o] += 1
        if config.objects[o] == "register":
            return str(fresh[o])
        return f"{o}.{fresh[o]}"

    events = []
    while True:
        actions = []
        for p in procs:
            if p.state == "idle" and p.calls_left:
                actions.append(("invoke", p))
            elif p.state == "invoked" and p.will_effect:
                actions.append(("effect", p))
            elif p.state == "effected" and not (p.hangs and not p.calls_left):
                actions.append(("respond", p))
        if not actions:
            break
        act, p = rng.choice(actions)
        if act == "invoke":
            o = rng.choice(objects)
            op, takes_arg = rng.choice(GEN_OPS[config.objects[o]])
            args = (next_value(o),) if takes_arg else ()
            p.seq += 1
            p.calls_left -= 1
            p.call = (o, op, args)
            p.state = "invoked"
            p.will_effect = not (p.hangs and not p.calls_left) or rng.random() < 0.5
            events.append(Event(INV, p.pid, p.seq, o, op, args))
        elif act == "effect":
            o, op, args = p.call
            state[o], p.result = specs[o].apply(state[o], op, args)
            p.state = "effected"
        else:
            o, op, _ = p.call
            events.append(Event(RESP, p.pid, p.seq, o, op, p.result))
            p.state = "idle"

    if inject is not None:
        events.extend(_inject(rng, inject, procs, config.objects, next_value))
    return validate(events, dict(config.objects))


def _inject(rng, kind, procs, objects, next_value):
    idle = [p for p in procs if p.state == "idle"]
    target = INJECTIONS[kind][0]
    o = rng.choice(sorted(k for k, s in objects.items() if s == target))
    out = []

    def call(p, op, args, result):
        p.seq += 1
        out.append(Event(INV, p.pid, p.seq, o, op, args))
        out.append(Event(RESP, p.pid, p.seq, o, op, result))

    def pick():
        return rng.choice(idle)

    if kind == "stale-read":
        # Writes never store the initial value, so reading it after a write is illegal.
        call(pick(), "write", (next_value(o),), (OK,))
        call(pick(), "read", (), (BUILTIN_SPECS[target].initial,))
    elif kind == "lost-update":
        a, b = next_value(o), next_value(o)
        call(pick(), "write", (a,), (OK,))
        call(pick(), "write", (b,), (OK,))
        call(pick(), "read", (), (a,))
    else:
        a, b = next_value(o), next_value(o)
        call(pick(), "enq", (a,), (OK,))
        call(pick(), "enq", (b,), (OK,))
        call(pick(), "deq", (), (b,))
        call(pick(), "deq", (), (a,))
    return out


def random_config(rng: random.Random, max_procs=3, max_objects=3, max_events=12,
                  pending_prob=0.2, inject=None) -> GenConfig:
    """Draw a config with a random process count, object set and length bound."""
    prefix = {"register": "r", "fifo-queue": "q", "stack": "s"}
    n_obj = rng.randint(1, max_objects)
    kinds = sorted(GEN_OPS)
    objects = {}
    for i in range(n_obj):
        kind = rng.choice(kinds)
        objects[f"{prefix[kind]}{i + 1}"] = kind
    length = rng.randint(0, max_events)
    if inject is not None:
        target, cost = INJECTIONS[inject.kind]
        if target not in objects.values():
            objects[f"{prefix[target]}{n_obj + 1}"] = target
        length += cost
    return GenConfig(
        seed=rng.getrandbits(64),
        procs=rng.randint(1, max_procs),
        objects=objects,
        max_events=length,
        pending_prob=pending_prob,
        inject=inject,
    )

