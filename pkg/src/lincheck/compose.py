"""Compositional checking: per-object certificates merged into a global one.

The merge repeatedly takes, among the first unconsumed call of every
per-object linearization, the call whose invocation comes earliest in the
original history.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .checker import (
    DEFAULT_BUDGET,
    STRENGTHENED,
    LinearizationCertificate,
    NotLinearizable,
    linearize,
    verify_certificate,
)
from .history import History, difference, is_sequential, is_well_formed, project_object


class InvalidObjectCertificate(ValueError):
    def __init__(self, obj, reason=""):
        super().__init__(f"certificate for object {obj!r} is invalid: {reason}")
        self.obj = obj


class InvalidCertificate(ValueError):
    pass


@dataclass(frozen=True)
class ObjectCertificateSet:
    original: History
    certs: dict
    registry: Optional[dict] = field(default=None, compare=False)


def compose(certs: ObjectCertificateSet, mode: str = STRENGTHENED) -> LinearizationCertificate:
    h = certs.original
    for o in h.objects:
        if o not in certs.certs:
            raise InvalidObjectCertificate(o, "missing")
    for o, cert in certs.certs.items():
        report = verify_certificate(project_object(h, o), cert, certs.registry)
        if not report:
            raise InvalidObjectCertificate(o, report.violations[0].detail)

    objects = sorted(certs.certs)
    streams = {o: list(certs.certs[o].linearization.calls()) for o in objects}
    heads = dict.fromkeys(objects, 0)
    merged = []
    while True:
        candidates = [
            (h.index_of(streams[o][heads[o]].inv), o)
            for o in objects
            if heads[o] < len(streams[o])
        ]
        if not candidates:
            break
        candidates.sort()
        if len(candidates) > 1 and candidates[0][0] == candidates[1][0]:
            raise AssertionError("two streams share an invocation position")
        o = candidates[0][1]
        merged.append(streams[o][heads[o]])
        heads[o] += 1

    s_events = []
    for m in merged:
        s_events.extend((m.inv, m.resp))

    ext = _merge_extensions(h, {o: certs.certs[o].extension for o in objects})
    completed = frozenset().union(*(c.completed_pending for c in certs.certs.values()))
    return LinearizationCertificate(
        extension=ext,
        linearization=History(tuple(s_events), h.meta),
        mode=mode,
        completed_pending=completed,
        objects=dict(certs.certs),
    )


def _merge_extensions(h: History, exts: Mapping[str, History]) -> History:
    """Build H' with H'|o equal to each (H|o)'.

    Appended responses keep their place relative to H|o events; those
    after the last H|o event go after all of H, grouped by object.
    """
    pending_before = {}
    trailing = {}
    for o, ext in exts.items():
        queue = []
        for e in ext.events:
            if e.key in h.position:
                if queue:
                    pending_before[e.key] = queue
                    queue = []
            else:
                queue.append(e)
        trailing[o] = queue
    events = []
    for e in h.events:
        events.extend(pending_before.get(e.key, ()))
        events.append(e)
    for o in sorted(trailing):
        events.extend(trailing[o])
    return History(tuple(events), h.meta)


def check_objects(
    h: History, reg: Mapping, mode=STRENGTHENED, budget=DEFAULT_BUDGET
) -> dict:
    """Linearize every object subhistory. Values are certificates or the
    ``NotLinearizable`` raised for that object."""
    out = {}
    for o in h.objects:
        try:
            out[o] = linearize(project_object(h, o), reg, mode, budget)
        except NotLinearizable as exc:
            exc.obj = o
            out[o] = exc
    return out


def check_compositional(
    h: History, reg: Mapping, mode=STRENGTHENED, budget=DEFAULT_BUDGET
) -> LinearizationCertificate:
    results = check_objects(h, reg, mode, budget)
    for o, res in results.items():
        if isinstance(res, NotLinearizable):
            raise NotLinearizable(res.completions, res.states, obj=o)
    cert = compose(ObjectCertificateSet(h, results, dict(reg)), mode)
    cert.stats.update(states=sum(c.stats.get("states", 0) for c in results.values()))
    return cert


def project_certificate(cert: LinearizationCertificate, o: str) -> LinearizationCertificate:
    """Restrict a certificate to one object: extension H'|o, linearization S|o."""
    ext, s = cert.extension, cert.linearization
    if not is_well_formed(ext.events):
        raise InvalidCertificate("extension is not a well-formed history")
    if not is_sequential(s):
        raise InvalidCertificate("linearization is not sequential")
    sub_ext = project_object(ext, o)
    ids = {e.call_id for e in sub_ext.events}
    return LinearizationCertificate(
        extension=sub_ext,
        linearization=project_object(s, o),
        mode=cert.mode,
        completed_pending=frozenset(c for c in cert.completed_pending if c in ids),
    )


def appended_responses(h: History, cert: LinearizationCertificate) -> History:
    return difference(cert.extension, h)
