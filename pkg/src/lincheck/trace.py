"""JSON Lines trace files and certificate documents.

Trace line forms (canonical: keys in this order, no whitespace, LF)::

    {"type":"inv","proc":1,"seq":1,"obj":"q","op":"enq","payload":["x"]}
    {"type":"resp","proc":1,"seq":1,"obj":"q","op":"enq","payload":["ok"]}
    {"type":"msg","from_event":[1,2],"to_event":[2,1]}

Line order of inv/resp records is the history's order. A ``msg`` record
links the invocation of send call ``from_event`` (proc, seq) to the
response of receive call ``to_event``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional

from .checker import LinearizationCertificate
from .history import INV, RESP, Event, History, ValidationError, complete_of, validate
from .order import build_causality, verify_extension


class TraceFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CertificateError(ValueError):
    pass


class UnresolvedCall(CertificateError):
    """The linearization names a call the extension does not complete."""


@dataclass(frozen=True)
class Message:
    src: tuple
    dst: tuple

    @property
    def send_key(self):
        return (self.src[0], self.src[1], INV)

    @property
    def receive_key(self):
        return (self.dst[0], self.dst[1], RESP)


@dataclass(frozen=True)
class Trace:
    records: tuple

    @property
    def events(self) -> tuple:
        return tuple(r for r in self.records if isinstance(r, Event))

    @property
    def messages(self) -> tuple:
        return tuple(r for r in self.records if isinstance(r, Message))

    def line_of(self, event_index: int) -> int:
        seen = -1
        for line, r in enumerate(self.records, 1):
            if isinstance(r, Event):
                seen += 1
                if seen == event_index:
                    return line
        return len(self.records)

    def history(self, meta: Optional[dict] = None) -> History:
        try:
            return validate(self.events, meta)
        except ValidationError as exc:
            rule = getattr(exc, "rule", "duplicate event")
            raise TraceFormatError(self.line_of(exc.index), f"not well-formed ({rule})") from exc


def event_record(e: Event) -> dict:
    return {
        "type": e.kind,
        "proc": e.proc,
        "seq": e.seq,
        "obj": e.obj,
        "op": e.op,
        "payload": list(e.payload),
    }


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def dump_record(r) -> str:
    if isinstance(r, Message):
        return _dumps({"type": "msg", "from_event": list(r.src), "to_event": list(r.dst)})
    return _dumps(event_record(r))


def dumps_trace(records: Iterable) -> str:
    if isinstance(records, (Trace, History)):
        records = records.records if isinstance(records, Trace) else records.events
    return "".join(dump_record(r) + "\n" for r in records)


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def parse_record(data, line: int):
    if not isinstance(data, dict):
        raise TraceFormatError(line, "record is not a JSON object")
    kind = data.get("type")
    if kind == "msg":
        try:
            src, dst = data["from_event"], data["to_event"]
        except KeyError as exc:
            raise TraceFormatError(line, f"msg record lacks {exc.args[0]}") from None
        for ref in (src, dst):
            if not (isinstance(ref, list) and len(ref) == 2 and all(map(_is_int, ref))):
                raise TraceFormatError(line, "msg endpoints must be [proc, seq]")
        return Message(tuple(src), tuple(dst))
    if kind not in (INV, RESP):
        raise TraceFormatError(line, f"unknown record type {kind!r}")
    for k in ("proc", "seq", "obj", "op", "payload"):
        if k not in data:
            raise TraceFormatError(line, f"missing field {k!r}")
    if not (_is_int(data["proc"]) and _is_int(data["seq"])):
        raise TraceFormatError(line, "proc and seq must be integers")
    if not (isinstance(data["obj"], str) and isinstance(data["op"], str)):
        raise TraceFormatError(line, "obj and op must be strings")
    payload = data["payload"]
    if not (isinstance(payload, list) and all(isinstance(v, str) for v in payload)):
        raise TraceFormatError(line, "payload must be a list of strings")
    try:
        return Event(kind, data["proc"], data["seq"], data["obj"], data["op"], payload)
    except ValueError as exc:
        raise TraceFormatError(line, str(exc)) from None


def parse_trace(text: str) -> Trace:
    records = []
    for line, raw in enumerate(text.split("\n"), 1):
        if not raw.strip():
            continue
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(line, f"invalid JSON ({exc.msg})") from None
        records.append(parse_record(data, line))
    return Trace(tuple(records))


def read_trace(path) -> Trace:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read())


def write_trace(path, records) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_trace(records))


def check_messages(trace: Trace, h: History) -> None:
    """Messages must form an acyclic causality order that the trace order extends."""
    if not trace.messages:
        return
    chains = {p: [e for e in h.events if e.proc == p] for p in h.procs}
    msgs = [(m.send_key, m.receive_key) for m in trace.messages]
    c = build_causality(chains, msgs)
    if not verify_extension(c, [e.key for e in h.events]):
        raise ValueError("trace order contradicts a message edge")


def _ids(ids) -> list:
    return [list(i) for i in sorted(ids)]


def cert_to_json(cert: LinearizationCertificate) -> dict:
    doc = {
        "mode": cert.mode,
        "completed_pending": _ids(cert.completed_pending),
        "linearization": [list(m.id) for m in cert.linearization.calls()],
        "extension": [event_record(e) for e in cert.extension.events],
    }
    if cert.objects:
        doc["objects"] = {o: cert_to_json(c) for o, c in sorted(cert.objects.items())}
    return doc


def cert_from_json(doc) -> LinearizationCertificate:
    """Rebuild a certificate; linearization call ids are resolved against
    the complete calls of the extension."""
    try:
        mode = doc["mode"]
        ext_records = doc["extension"]
        order = doc["linearization"]
        completed = doc.get("completed_pending", [])
        objects = doc.get("objects", {})
    except (KeyError, TypeError, AttributeError) as exc:
        raise CertificateError(f"malformed certificate: {exc!r}") from None
    events = []
    for i, rec in enumerate(ext_records):
        try:
            events.append(parse_record(rec, i + 1))
        except TraceFormatError as exc:
            raise CertificateError(f"extension record {exc}") from None
    ext = History(tuple(e for e in events if isinstance(e, Event)))
    calls = {m.id: m for m in complete_of(ext).complete_calls()}
    s_events = []
    for ident in order:
        m = calls.get(tuple(ident))
        if m is None:
            raise UnresolvedCall(
                f"linearization names call {ident} that is not complete in the extension"
            )
        s_events.extend((m.inv, m.resp))
    return LinearizationCertificate(
        extension=ext,
        linearization=History(tuple(s_events)),
        mode=mode,
        completed_pending=frozenset(tuple(c) for c in completed),
        objects={o: cert_from_json(d) for o, d in objects.items()},
    )


def write_certificate(path, cert: LinearizationCertificate) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cert_to_json(cert), fh, indent=1)
        fh.write("\n")


def read_certificate(path) -> LinearizationCertificate:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"invalid JSON: {exc.msg}") from None
    return cert_from_json(doc)
