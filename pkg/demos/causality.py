"""
Causality and well-order extension
==================================

Program order, invocation-to-response and message edges generate a
partial order on events. A deterministic topological sort extends it to
a total order; a cycle is reported with a witness path.
"""

from lincheck import build_causality, extend_to_well_order, inv, resp, verify_extension
from lincheck.order import CyclicCausality


def calls(p, *ops):
    out = []
    for j, op in enumerate(ops, 1):
        out += [inv(p, j, "net", op), resp(p, j, "net", op, "ok")]
    return out


p1 = calls(1, "work", "send")
p2 = calls(2, "receive", "work")
c = build_causality({1: p1, 2: p2}, [(p1[2], p2[1])])
order = extend_to_well_order(c)
for k in order:
    print(k)
print("extension valid:", verify_extension(c, order))
print("p1 work precedes p2 work:", c.precedes(p1[0].key, p2[2].key))
print("p2 receive-inv precedes p1 send:", c.precedes(p2[0].key, p1[2].key))

# Each process receives before it sends what the other one receives
a, b = calls(1, "receive", "send"), calls(2, "receive", "send")
try:
    build_causality({1: a, 2: b}, [(a[2], b[1]), (b[2], a[1])])
except CyclicCausality as exc:
    print("cycle:", " -> ".join(map(str, exc.cycle)))
