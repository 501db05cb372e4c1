"""
Histories, projections and completion
=====================================

A history is a finite sequence of invocation and response events. Its
position order is the well order every other notion is defined from.
"""

from lincheck import complete_of, equivalent, inv, project_object, project_process, resp, validate

# Two processes, two objects, one call still pending at the end.
h = validate([
    inv(1, 1, "q", "enq", "x"),
    inv(2, 1, "r", "write", "1"),
    resp(1, 1, "q", "enq", "ok"),
    inv(1, 2, "r", "read"),
    resp(2, 1, "r", "write", "ok"),
    resp(1, 2, "r", "read", "1"),
    inv(2, 2, "q", "deq"),
])
print(h)

# Subhistories by process and by object keep the original order
print("H|p1 =", project_process(h, 1))
print("H|q  =", project_object(h, "q"))

# complete(H) drops the invocation of the pending dequeue
print("pending:", [str(m) for m in h.pending_calls()])
print("complete(H) =", complete_of(h))

# Reordering events across processes gives an equivalent history
g = validate([h.events[i] for i in (1, 0, 4, 2, 3, 5, 6)])
print("equivalent:", equivalent(h, g), " equal:", h == g)

# Ill-formed input is rejected with the offending index and rule
try:
    validate([inv(1, 1, "q", "deq"), inv(1, 2, "q", "deq")])
except ValueError as exc:
    print("rejected:", exc)
