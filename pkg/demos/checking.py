"""
Checking a history and replaying the certificate
================================================

``linearize`` searches for an extension H' and a legal sequential S.
The returned certificate can be checked by ``verify_certificate`` without
repeating the search.
"""

from dataclasses import replace

from lincheck import (
    NotLinearizable,
    inv,
    linearize,
    make_registry,
    resp,
    validate,
    verify_certificate,
)
from lincheck.history import sequential_from_calls

reg = make_registry({"q": "fifo-queue", "r": "register"})

# Two overlapping enqueues; the later dequeue sees y, so y went in first.
h = validate([
    inv(1, 1, "q", "enq", "x"), inv(2, 1, "q", "enq", "y"),
    resp(1, 1, "q", "enq", "ok"), resp(2, 1, "q", "enq", "ok"),
    inv(1, 2, "q", "deq"), resp(1, 2, "q", "deq", "y"),
])
cert = linearize(h, reg)
print("S =", [m.id for m in cert.linearization.calls()])
print("states explored:", cert.stats["states"])
print("replay:", bool(verify_certificate(h, cert, reg)))

# A pending enqueue whose value was already dequeued must be completed
h2 = validate([inv(1, 1, "q", "enq", "x"), inv(2, 1, "q", "deq"), resp(2, 1, "q", "deq", "x")])
cert2 = linearize(h2, reg)
print("completed pending calls:", sorted(cert2.completed_pending))
print("H' =", cert2.extension)

# A read of the initial value after a finished write has no linearization
stale = validate([
    inv(1, 1, "r", "write", "1"), resp(1, 1, "r", "write", "ok"),
    inv(2, 1, "r", "read"), resp(2, 1, "r", "read", "0"),
])
try:
    linearize(stale, reg)
except NotLinearizable as exc:
    print("stale read:", exc)

# Tampering with S is caught and the broken condition is named
calls = list(cert.linearization.calls())
bad = replace(cert, linearization=sequential_from_calls([calls[1], calls[0], calls[2]]))
report = verify_certificate(h, bad, reg)
print("tampered:", report.first, "-", report.violations[0].detail)
