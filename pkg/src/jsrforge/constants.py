"""Reference data: the explicit chiral-SMP example and the table of further examples."""

import numpy as np

# Pair whose products aababb and bbabaa are both spectrum maximizing.
A0 = np.array([[0.81427, -0.32898], [0.73419, 0.50393]])
B0 = np.array([[-0.06078, 1.01008], [-0.88368, -0.26830]])

SMP_PAIR = ("aababb", "bbabaa")

# Dominant eigenvalue of A0^2 B0 A0 B0^2, to 5 digits.
DOMINANT_EIGENVALUE = -0.99998
# Euclidean length of the second seed eigenvector relative to the first.
BALANCING_RATIO = 0.885
# Leading eigenvectors of aababb(A, B) and bbabaa(A, B) as seeded, to 5 digits.
SEED_VECTORS = (np.array([0.63620, 0.77152]), np.array([0.88452, 0.02929]))
MIN_INTERIOR_MARGIN = 7.6e-4
MAX_INTERIOR_ANGLE_DEG = 175.8
# Vertex count of the invariant polygon (16 pairs of opposite vertices).
POLYGON_VERTICES = 32

# Runner-up: normalised spectral radius of a^3 b a^2 b, and the shift of B[1, 0]
# that makes it the unique SMP.
RUNNER_UP_WORD = "aaabaab"
RUNNER_UP_RHO = 0.99936
RUNNER_UP_SHIFT_B21 = 0.005

# Search setup.
LYNDON_MAX_LEN = 14
LYNDON_COUNT = 2538
ISOSPECTRAL_CLASSES = 1549
TARGET_MAX_LEN = 9
CHIRAL_PAIRS_TO_9 = 23
SAMPLE_RANGES = {"x": (-10.0, 10.0), "y": (-10.0, 10.0), "z": (-100.0, 100.0),
                 "u": (-10.0, 10.0), "v": (-10.0, 10.0)}

# (SMP word, (x, y, z, u, v), n) where 2n is the vertex count of the reference polygon.
TABLE = (
    ("aabbab", (3.38477, -0.84501, 5.58856, 4.29803, 5.99245), 18),
    ("aabbab", (-1.81325, 3.83802, 8.57711, 8.79352, 7.69271), 18),
    ("aaababb", (-0.28009, 2.51662, -9.78050, 7.09393, 3.76472), 34),
    ("aaababb", (-2.41561, 4.01089, -10.27036, 8.39182, 4.16903), 40),
    ("aabbabbb", (-2.27713, -4.85077, -3.83135, 7.50043, 7.58161), 19),
    ("aabbabbb", (-2.46102, -5.50086, -4.86349, 9.90656, 9.80116), 23),
    ("aabaababb", (2.48264, -0.68806, 3.67748, 2.74344, 3.59137), 30),
    ("aabaababb", (3.16180, -0.93207, 5.83803, 4.74510, 5.58561), 30),
)
TABLE_VERTEX_TOLERANCE = 4
