"""
Synthetic paths with known Holder exponents, built without any cascade code.
"""

import math

import numpy as np


def identity_path(b: int, generation: int) -> np.ndarray:
    """F(t) = t on the grid j / b^generation."""
    size = b ** generation
    return (np.arange(size + 1) / float(size)).astype(complex)


def constant_path(b: int, generation: int, value: complex = 0.0) -> np.ndarray:
    return np.full(b ** generation + 1, value, dtype=complex)


def self_affine_ratios(b: int) -> np.ndarray:
    """b complex ratios c_j with |c_j| = b^-1/2 and sum c_j = 1.

    b even: half at angle +theta, half at -theta, cos(theta) = b^-1/2
    (b = 2 gives 1/2 +/- i/2). b odd: one real ratio, the others at
    +/- theta with cos(theta) = 1 / (sqrt(b) + 1).
    """
    modulus = b ** -0.5
    if b % 2 == 0:
        theta = math.acos(modulus)
        angles = [theta if j % 2 == 0 else -theta for j in range(b)]
    else:
        theta = math.acos(1.0 / (math.sqrt(b) + 1.0))
        angles = [0.0] + [theta if j % 2 == 0 else -theta for j in range(b - 1)]
    return modulus * np.exp(1j * np.asarray(angles))


def self_affine_path(b: int, generation: int) -> np.ndarray:
    """Curve from 0 to 1 whose generation-n increments all have modulus b^(-n/2).

    Every I_w carries a scaled, rotated copy of the whole curve, so each
    coarse exponent equals 1/2 up to a log_b(diameter)/n correction.
    """
    ratios = self_affine_ratios(b)
    increments = np.ones(1, dtype=complex)
    for _ in range(generation):
        increments = np.outer(increments, ratios).reshape(-1)
    return np.concatenate([[0.0], np.cumsum(increments)])
