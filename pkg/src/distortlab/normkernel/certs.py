"""Partition-tree certificates for norm values.

A certificate is a nested choice of block splits. Indices are 0-based positions
in the CanonKey (or in the expanded RunVector). A ``Node`` covers the span handed
to it by its parent; ``boundaries`` are the start indices of blocks 2..ell.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import CertificateError
from ..vectorspace import LOG2P1, ScalingFunction


@dataclass(frozen=True)
class Leaf:
    index: int


@dataclass(frozen=True)
class Node:
    ell: int
    boundaries: tuple
    children: tuple


NormCert = Leaf | Node


@dataclass(frozen=True)
class EllCert:
    """Split of the support into at most ``ell`` blocks, each with its own NormCert."""

    ell: int
    boundaries: tuple
    children: tuple


def block_spans(start: int, stop: int, boundaries) -> list:
    edges = [start, *boundaries, stop]
    return list(zip(edges, edges[1:]))


def _check_node(node, start, stop):
    if node.ell < 2:
        raise CertificateError(f"node with ell = {node.ell} < 2")
    if len(node.boundaries) != node.ell - 1 or len(node.children) != node.ell:
        raise CertificateError("node needs ell-1 boundaries and ell children")
    edges = [start, *node.boundaries, stop]
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise CertificateError(f"blocks {edges} are not consecutive and nonempty within [{start}, {stop})")


def cert_weights(cert, length: int, f: ScalingFunction = LOG2P1) -> list:
    """Coefficient each coordinate receives in the certificate's linear functional.

    The certificate value is ``sum(w[i] * |x_i|)``; every coordinate not chosen
    by a leaf gets weight 0.
    """
    w = [0.0] * length
    if cert is None:
        return w
    stack = [(cert, 0, length, 1.0)]
    while stack:
        c, start, stop, mult = stack.pop()
        if isinstance(c, Leaf):
            if not start <= c.index < stop:
                raise CertificateError(f"leaf index {c.index} outside block [{start}, {stop})")
            w[c.index] += mult
        elif isinstance(c, Node):
            _check_node(c, start, stop)
            m = mult / f(c.ell)
            for child, (a, b) in zip(c.children, block_spans(start, stop, c.boundaries)):
                stack.append((child, a, b, m))
        else:
            raise CertificateError(f"not a certificate: {c!r}")
    return w


def verify_cert(key, cert, f: ScalingFunction = LOG2P1) -> float:
    """Bottom-up value of ``cert`` on ``key``; always a lower bound for the norm."""
    key = [float(abs(v)) for v in key]
    if cert is None:
        if key:
            raise CertificateError("empty certificate for a nonempty vector")
        return 0.0
    return _eval(key, cert, 0, len(key), f)


def _eval(key, c, start, stop, f):
    if isinstance(c, Leaf):
        if not start <= c.index < stop:
            raise CertificateError(f"leaf index {c.index} outside block [{start}, {stop})")
        return key[c.index]
    if not isinstance(c, Node):
        raise CertificateError(f"not a certificate: {c!r}")
    _check_node(c, start, stop)
    total = 0.0
    for child, (a, b) in zip(c.children, block_spans(start, stop, c.boundaries)):
        total += _eval(key, child, a, b, f)
    return total / f(c.ell)


def verify_ell_cert(key, cert: EllCert, f: ScalingFunction = LOG2P1) -> float:
    key = [float(abs(v)) for v in key]
    edges = [0, *cert.boundaries, len(key)]
    if not 1 <= len(cert.children) <= cert.ell or len(cert.children) != len(edges) - 1:
        raise CertificateError("ell certificate needs between 1 and ell blocks")
    if any(b <= a for a, b in zip(edges, edges[1:])):
        raise CertificateError(f"blocks {edges} are not consecutive and nonempty")
    total = sum(_eval(key, ch, a, b, f) for ch, (a, b) in zip(cert.children, zip(edges, edges[1:])))
    return total / f(cert.ell)


def constant_cert(start: int, length: int):
    """Optimal certificate of a constant block: all singletons."""
    if length == 1:
        return Leaf(start)
    return Node(length, tuple(range(start + 1, start + length)),
                tuple(Leaf(i) for i in range(start, start + length)))


def shift_cert(cert, offset: int):
    if offset == 0 or cert is None:
        return cert
    if isinstance(cert, Leaf):
        return Leaf(cert.index + offset)
    return Node(cert.ell, tuple(b + offset for b in cert.boundaries),
                tuple(shift_cert(ch, offset) for ch in cert.children))


def cert_to_json(cert):
    """Leaf -> index; Node -> [ell, [boundaries], [children]]."""
    if cert is None:
        return None
    if isinstance(cert, Leaf):
        return cert.index
    if isinstance(cert, EllCert):
        return {"ell": cert.ell, "boundaries": list(cert.boundaries),
                "children": [cert_to_json(c) for c in cert.children]}
    return [cert.ell, list(cert.boundaries), [cert_to_json(c) for c in cert.children]]


def cert_from_json(obj):
    if obj is None:
        return None
    if isinstance(obj, bool):
        raise CertificateError("malformed certificate")
    if isinstance(obj, int):
        return Leaf(obj)
    if isinstance(obj, dict):
        return EllCert(int(obj["ell"]), tuple(obj["boundaries"]),
                       tuple(cert_from_json(c) for c in obj["children"]))
    try:
        ell, bounds, kids = obj
        return Node(int(ell), tuple(int(b) for b in bounds), tuple(cert_from_json(c) for c in kids))
    except (TypeError, ValueError) as exc:
        raise CertificateError(f"malformed certificate: {exc}") from None


def cert_depth(cert) -> int:
    if cert is None or isinstance(cert, Leaf):
        return 0
    return 1 + max(cert_depth(c) for c in cert.children)
