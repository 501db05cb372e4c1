"""
Generated traces and injected violations
========================================

Seeded generation simulates atomic objects, so clean traces always
linearize. Injected scenarios are appended on idle processes and can never
be explained by any linearization. Both checking modes must agree.
"""

import random

from lincheck import GenConfig, Injection, generate, is_linearizable
from lincheck.compose import check_compositional
from lincheck.checker import NotLinearizable
from lincheck.generate import INJECTIONS, random_config
from lincheck.trace import dumps_trace

cfg = GenConfig(seed=1, procs=2, objects={"q": "fifo-queue"}, max_events=8)
print(dumps_trace(generate(cfg)), end="")


def compositional(h, reg):
    try:
        check_compositional(h, reg)
    except NotLinearizable:
        return False
    return True


rng = random.Random(0)
tally = {"clean": [0, 0]}
for _ in range(200):
    cfg = random_config(rng, pending_prob=0.2)
    h, reg = generate(cfg), cfg.registry()
    tally["clean"][is_linearizable(h, reg)] += 1
    assert is_linearizable(h, reg) == compositional(h, reg)

for kind in sorted(INJECTIONS):
    tally[kind] = [0, 0]
    for _ in range(100):
        cfg = random_config(rng, pending_prob=0.2, inject=Injection(kind))
        h, reg = generate(cfg), cfg.registry()
        tally[kind][is_linearizable(h, reg)] += 1
        assert is_linearizable(h, reg) == compositional(h, reg)

print(f"{'traces':16} {'rejected':>8} {'accepted':>8}")
for name, (no, yes) in tally.items():
    print(f"{name:16} {no:>8} {yes:>8}")
