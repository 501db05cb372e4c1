"""Linearizability checking over well-ordered histories, with certificates
that can be replayed independently of the search that produced them."""

from .checker import (
    CLASSIC,
    STRENGTHENED,
    BudgetExceeded,
    LinearizationCertificate,
    NotLinearizable,
    VerificationReport,
    is_linearizable,
    linearize,
    verify_certificate,
)
from .compose import (
    InvalidObjectCertificate,
    ObjectCertificateSet,
    check_compositional,
    compose,
    project_certificate,
)
from .generate import GenConfig, Injection, generate
from .history import (
    Event,
    History,
    MethodCall,
    complete_of,
    difference,
    equivalent,
    inv,
    is_prefix,
    method_precedes,
    project_object,
    project_process,
    resp,
    validate,
)
from .order import build_causality, extend_to_well_order, verify_extension
from .specs import FIFO_QUEUE, REGISTER, STACK, SequentialSpec, is_legal, make_registry, step

__all__ = [
    "CLASSIC",
    "STRENGTHENED",
    "BudgetExceeded",
    "LinearizationCertificate",
    "NotLinearizable",
    "VerificationReport",
    "is_linearizable",
    "linearize",
    "verify_certificate",
    "InvalidObjectCertificate",
    "ObjectCertificateSet",
    "check_compositional",
    "compose",
    "project_certificate",
    "GenConfig",
    "Injection",
    "generate",
    "Event",
    "History",
    "MethodCall",
    "complete_of",
    "difference",
    "equivalent",
    "inv",
    "is_prefix",
    "method_precedes",
    "project_object",
    "project_process",
    "resp",
    "validate",
    "build_causality",
    "extend_to_well_order",
    "verify_extension",
    "FIFO_QUEUE",
    "REGISTER",
    "STACK",
    "SequentialSpec",
    "is_legal",
    "make_registry",
    "step",
]

__version__ = "0.1.0"
