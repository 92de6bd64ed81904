"""Vector primitives shared by the imaging and quantum pipelines.

States and images are plain numpy arrays. Quantum states are complex 1-D
arrays; images may be 1-D or 2-D real arrays and are flattened for every
overlap.
"""

import numpy as np


def _pair(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size != b.size:
        raise ValueError(f"dimension mismatch: {a.size} != {b.size}")
    return a.ravel(), b.ravel()


def inner_product(a, b) -> complex:
    """Return <a|b> = sum(conj(a_i) * b_i)."""
    a, b = _pair(a, b)
    return complex(np.vdot(a, b))


def fidelity(a, b) -> float:
    """Pure-state fidelity |<a|b>|^2 / (<a|a><b|b>).

    Both norms are divided out, so unnormalised probe vectors behave like
    the physical projective measurement onto their direction.
    """
    a, b = _pair(a, b)
    na = np.vdot(a, a).real
    nb = np.vdot(b, b).real
    if na == 0.0 or nb == 0.0:
        raise ValueError("fidelity undefined for a zero-norm vector")
    ov = np.vdot(a, b)
    f = (ov.real * ov.real + ov.imag * ov.imag) / (na * nb)
    return float(min(max(f, 0.0), 1.0))


def linear_overlap(o, m) -> float:
    """Real linear overlap sum(o_i * m_i) used as the imaging distance measure."""
    o, m = _pair(o, m)
    return float(np.dot(o, m))


def normalize(v):
    """Return ``v`` scaled to unit Euclidean norm, keeping its shape and phase."""
    v = np.asarray(v)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / norm
