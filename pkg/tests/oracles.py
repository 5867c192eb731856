"""Independent reference computations used to freeze derived test values.

None of these call into the package's formula code: they go through
singular values, brute-force enumeration or dense sampling instead.
"""

import cmath
import itertools
import math
import random

import numpy as np


def dilatation(A) -> float:
    """Ratio of singular values of a real 2x2 matrix."""
    s = np.linalg.svd(np.asarray(A, dtype=float), compute_uv=False)
    return float(s[0] / s[1])


def shear_dilatation(t: float) -> float:
    return dilatation([[1.0, t], [0.0, 1.0]])


def lattice_map(tau1: complex, tau2: complex):
    """Real-linear map of the plane sending 1 -> 1 and tau1 -> tau2."""
    B1 = np.array([[1.0, tau1.real], [0.0, tau1.imag]])
    B2 = np.array([[1.0, tau2.real], [0.0, tau2.imag]])
    return B2 @ np.linalg.inv(B1)


def torus_distance_affine(tau1: complex, tau2: complex) -> float:
    """Half log of the dilatation of the affine map between the two lattices."""
    return 0.5 * math.log(dilatation(lattice_map(tau1, tau2)))


def four_point_bruteforce(D) -> float:
    n = len(D)
    best = 0.0
    for a, b, c, d in itertools.combinations(range(n), 4):
        s = sorted([D[a][b] + D[c][d], D[a][c] + D[b][d], D[a][d] + D[b][c]])
        best = max(best, (s[2] - s[1]) / 4)
    return best


def random_tree_metric(rng: random.Random, n: int):
    """Shortest-path metric of a random weighted tree on n vertices."""
    parent = [None] + [rng.randrange(i) for i in range(1, n)]
    w = [0.0] + [rng.uniform(0.1, 5.0) for _ in range(1, n)]
    depth = [0.0] * n
    anc = [[i] for i in range(n)]
    for i in range(1, n):
        depth[i] = depth[parent[i]] + w[i]
        anc[i] = anc[parent[i]] + [i]
    D = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            common = [a for a in anc[i] if a in set(anc[j])]
            lca = common[-1]
            D[i][j] = depth[i] + depth[j] - 2 * depth[lca]
    return D


def hyp_dist(a: complex, b: complex) -> float:
    return math.acosh(1 + abs(a - b) ** 2 / (2 * a.imag * b.imag))


def point_segment_sampled(u: complex, a: complex, b: complex, samples: int = 20001) -> float:
    """Half-hyperbolic distance from u to the geodesic segment [a, b] by dense sampling.

    The segment is parametrised through the Cayley transform to the disc,
    where geodesics through a suitable rotation are easy to sample.
    """
    # move a to i by z -> (z - a.real) / a.imag, then rotate so b lies on the imaginary axis
    def to_std(z):
        return (z - a.real) / a.imag
    bb = to_std(b)
    # disc model centred at i
    def to_disc(z):
        return (z - 1j) / (z + 1j)
    def from_disc(w):
        return 1j * (1 + w) / (1 - w)
    wb = to_disc(bb)
    r, phi = abs(wb), cmath.phase(wb)
    best = math.inf
    uu = to_std(u)
    for k in range(samples):
        s = r * k / (samples - 1)
        z = from_disc(s * cmath.exp(1j * phi))
        best = min(best, hyp_dist(uu, z))
    return 0.5 * best
