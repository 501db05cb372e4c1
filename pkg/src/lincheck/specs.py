"""Executable sequential specifications.

A spec is a deterministic state machine. ``transition(state, op, args)``
returns ``(next_state, result)`` or ``None`` when the invocation has no
legal outcome. Prefix closure follows from step-wise evaluation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Mapping

from .history import History, MethodCall, is_complete, is_sequential, project_object

EMPTY = "empty"
OK = "ok"


class UnknownOperation(ValueError):
    pass


class UnregisteredObject(KeyError):
    pass


class NotSequential(ValueError):
    pass


class NotComplete(ValueError):
    pass


class _Illegal:
    def __repr__(self):
        return "ILLEGAL"


ILLEGAL = _Illegal()


@dataclass(frozen=True)
class SequentialSpec:
    name: str
    initial: object
    transition: Callable
    ops: frozenset

    def apply(self, state, op: str, args: tuple):
        if op not in self.ops:
            raise UnknownOperation(f"{self.name} has no operation {op!r}")
        return self.transition(state, op, tuple(args))


def _register(state, op, args):
    if op == "write":
        if len(args) != 1:
            return None
        return args[0], (OK,)
    if args:
        return None
    return state, (state,)


def _fifo(state, op, args):
    if op == "enq":
        if len(args) != 1:
            return None
        return state + (args[0],), (OK,)
    if args:
        return None
    if not state:
        return state, (EMPTY,)
    return state[1:], (state[0],)


def _stack(state, op, args):
    if op == "push":
        if len(args) != 1:
            return None
        return state + (args[0],), (OK,)
    if args:
        return None
    if not state:
        return state, (EMPTY,)
    return state[:-1], (state[-1],)


REGISTER = SequentialSpec("register", "0", _register, frozenset({"write", "read"}))
FIFO_QUEUE = SequentialSpec("fifo-queue", (), _fifo, frozenset({"enq", "deq"}))
STACK = SequentialSpec("stack", (), _stack, frozenset({"push", "pop"}))

BUILTIN_SPECS = {s.name: s for s in (REGISTER, FIFO_QUEUE, STACK)}


def register_spec(spec: SequentialSpec):
    """Make a user-defined spec available by name to registries and trace files."""
    BUILTIN_SPECS[spec.name] = spec


def step(spec: SequentialSpec, state, call: MethodCall):
    """Apply a complete call; ``ILLEGAL`` if its recorded result differs from the specification's."""
    if call.pending:
        raise ValueError(f"step needs a complete call, got pending {call}")
    out = spec.apply(state, call.op, call.args)
    if out is None or out[1] != call.result:
        return ILLEGAL
    return out[0]


def make_registry(mapping: Mapping[str, object]) -> dict:
    """Object id -> spec, accepting spec names or spec objects."""
    reg = {}
    for obj, spec in mapping.items():
        if isinstance(spec, str):
            if spec not in BUILTIN_SPECS:
                raise ValueError(f"unknown spec name {spec!r} for object {obj!r}")
            spec = BUILTIN_SPECS[spec]
        reg[obj] = spec
    return reg


def load_registry(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise ValueError("registry must be a JSON object mapping object id to spec name")
    return make_registry(data)


def dump_registry(reg: Mapping[str, SequentialSpec]) -> str:
    return json.dumps({o: s.name for o, s in sorted(reg.items())}, separators=(",", ":"))


def spec_for(reg: Mapping, obj: str) -> SequentialSpec:
    try:
        return reg[obj]
    except KeyError:
        raise UnregisteredObject(obj) from None


def is_legal(s: History, reg: Mapping) -> bool:
    if not is_sequential(s):
        raise NotSequential("legality is defined for sequential histories")
    if not is_complete(s):
        raise NotComplete("legality is checked on complete histories")
    for o in s.objects:
        spec = spec_for(reg, o)
        state = spec.initial
        for m in project_object(s, o).calls():
            state = step(spec, state, m)
            if state is ILLEGAL:
                return False
    return True
