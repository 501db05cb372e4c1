import random

import pytest
from hypothesis import given

from lincheck.history import History, MethodCall, inv, resp, sequential_from_calls, validate
from lincheck.specs import (
    FIFO_QUEUE,
    ILLEGAL,
    REGISTER,
    STACK,
    NotComplete,
    NotSequential,
    UnknownOperation,
    UnregisteredObject,
    is_legal,
    load_registry,
    make_registry,
    project_object,
    step,
)

from _oracle import legal_sequence
from _strategies import seeds

REG = make_registry({"q": "fifo-queue", "r": "register", "s": "stack"})


def call(p, j, o, op, args, res):
    return MethodCall(inv(p, j, o, op, *args), resp(p, j, o, op, *res))


def test_register_step():
    assert step(REGISTER, "0", call(1, 1, "r", "write", ["5"], ["ok"])) == "5"
    assert step(REGISTER, "5", call(1, 1, "r", "read", [], ["5"])) == "5"
    assert step(REGISTER, "5", call(1, 1, "r", "read", [], ["0"])) is ILLEGAL


def test_queue_step():
    assert step(FIFO_QUEUE, ("x",), call(1, 1, "q", "deq", [], ["x"])) == ()
    assert step(FIFO_QUEUE, ("x",), call(1, 1, "q", "deq", [], ["y"])) is ILLEGAL
    assert step(FIFO_QUEUE, (), call(1, 1, "q", "deq", [], ["empty"])) == ()


def test_stack_step():
    assert step(STACK, ("a", "b"), call(1, 1, "s", "pop", [], ["b"])) == ("a",)
    assert step(STACK, (), call(1, 1, "s", "pop", [], ["empty"])) == ()


def test_unknown_operation():
    with pytest.raises(UnknownOperation):
        step(REGISTER, "0", call(1, 1, "r", "cas", ["0", "1"], ["ok"]))


def seq(*calls):
    return sequential_from_calls(calls)


def test_is_legal_fifo():
    good = seq(call(1, 1, "q", "enq", ["x"], ["ok"]), call(1, 2, "q", "enq", ["y"], ["ok"]),
               call(2, 1, "q", "deq", [], ["x"]), call(2, 2, "q", "deq", [], ["y"]))
    assert is_legal(good, REG)
    bad = seq(call(1, 1, "q", "enq", ["x"], ["ok"]), call(1, 2, "q", "enq", ["y"], ["ok"]),
              call(2, 1, "q", "deq", [], ["y"]))
    assert not is_legal(bad, REG)


def test_is_legal_interleaved_objects():
    s = seq(call(1, 1, "q", "enq", ["x"], ["ok"]), call(2, 1, "r", "write", ["1"], ["ok"]),
            call(1, 2, "r", "read", [], ["1"]), call(2, 2, "q", "deq", [], ["x"]))
    assert is_legal(s, REG)
    for o in ("q", "r"):
        assert is_legal(project_object(s, o), REG)


def test_is_legal_preconditions():
    with pytest.raises(NotSequential):
        is_legal(validate([inv(1, 1, "q", "deq"), inv(2, 1, "q", "deq")]), REG)
    with pytest.raises(NotComplete):
        is_legal(validate([inv(1, 1, "q", "deq")]), REG)
    with pytest.raises(UnregisteredObject):
        is_legal(seq(call(1, 1, "zz", "deq", [], ["empty"])), REG)


def random_sequential(rng, n):
    """A sequential history whose results come from the oracle models, with
    an occasional wrong result."""
    calls = []
    names = {"q": "fifo-queue", "r": "register", "s": "stack"}
    menu = {"q": ("enq", "deq"), "r": ("write", "read"), "s": ("push", "pop")}
    for j in range(1, n + 1):
        o = rng.choice("qrs")
        op = rng.choice(menu[o])
        args = (rng.choice("xyz12"),) if op in ("enq", "write", "push") else ()
        calls.append((o, op, args))
    results = legal_sequence([(o, op, a, None) for o, op, a in calls], names)
    out = []
    for j, ((o, op, a), res) in enumerate(zip(calls, results), 1):
        if rng.random() < 0.1:
            res = (rng.choice("xyz12"),)
        out.append(call(rng.randint(1, 3), j, o, op, a, res))
    return seq(*out), names


@given(seeds)
def test_prefix_closure_and_locality(seed):
    rng = random.Random(seed)
    s, names = random_sequential(rng, rng.randint(0, 10))
    legal = is_legal(s, REG)
    expected = legal_sequence(
        [(m.obj, m.op, m.args, m.result) for m in s.calls()], names) is not None
    assert legal == expected
    if legal:
        for k in range(0, len(s) + 1, 2):
            assert is_legal(History(s.events[:k]), REG)
    assert legal == all(is_legal(project_object(s, o), REG) for o in s.objects)


def test_load_registry(tmp_path):
    path = tmp_path / "reg.json"
    path.write_text('{"q1":"fifo-queue","r1":"register"}')
    reg = load_registry(path)
    assert reg["q1"] is FIFO_QUEUE and reg["r1"] is REGISTER
    path.write_text('{"q1":"priority-queue"}')
    with pytest.raises(ValueError):
        load_registry(path)
