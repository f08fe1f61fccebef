"""Shared fixtures and closed-form oracles for the minklab tests."""

import numpy as np
import pytest
from hypothesis import strategies as st

from minklab.config import Config
from minklab.norms import euclidean, quartic_reg, randers

SPD_3 = [[2.0, 0.3, 0.0], [0.3, 1.0, 0.1], [0.0, 0.1, 1.5]]
EPS = 0.2

EUCLID3 = euclidean(SPD_3)
IDENTITY3 = euclidean(np.eye(3))
RANDERS3 = randers(np.eye(3), [0.5, 0.0, 0.0])
QUARTIC3 = quartic_reg(3, EPS)
QUARTIC2 = quartic_reg(2, EPS)
FAMILIES3 = [EUCLID3, RANDERS3, QUARTIC3]


@st.composite
def admissible_points(draw, dim=3, min_norm=0.3):
    """Points with bounded coordinates kept away from the origin"""
    coords = draw(st.lists(st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
                           min_size=dim, max_size=dim))
    y = np.array(coords)
    if np.linalg.norm(y) < min_norm:
        y = y + min_norm * np.eye(dim)[0]
    if np.linalg.norm(y) < min_norm:
        y = np.eye(dim)[1]
    return y


def quartic_metric_oracle(y, eps=EPS):
    """g = (1/4) u^-1/2 d2u - (1/8) u^-3/2 du du^T for u = s^2 + eps * sum y_i^4"""
    y = np.asarray(y, dtype=float)
    s = y @ y
    u = s * s + eps * np.sum(y ** 4)
    du = 4.0 * s * y + 4.0 * eps * y ** 3
    d2u = 8.0 * np.outer(y, y) + np.diag(4.0 * s + 12.0 * eps * y ** 2)
    return 0.25 * u ** -0.5 * d2u - 0.125 * u ** -1.5 * np.outer(du, du)


def randers_metric_oracle(y, A, b):
    """g_ij = (F / alpha)(a_ij - l_i l_j) + (l_i + b_i)(l_j + b_j), l = A y / alpha"""
    y = np.asarray(y, dtype=float)
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    alpha = np.sqrt(y @ A @ y)
    F = alpha + b @ y
    ell = A @ y / alpha
    return (F / alpha) * (A - np.outer(ell, ell)) + np.outer(ell + b, ell + b)


def fd_metric_derivative(metric, y, h=1e-5):
    """d_k g_ij by central differences, index order [i, j, k]"""
    y = np.asarray(y, dtype=float)
    n = len(y)
    out = np.zeros((n, n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        out[:, :, k] = (metric(y + e) - metric(y - e)) / (2.0 * h)
    return out


@pytest.fixture
def config(tmp_path, monkeypatch):
    """Default configuration, single worker thread"""
    monkeypatch.setenv("MLAB_THREADS", "1")
    return Config(str(tmp_path / "missing.json"))
