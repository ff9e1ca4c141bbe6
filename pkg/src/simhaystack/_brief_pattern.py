"""Fixed 256-pair sampling pattern for the rotated binary descriptor.

Generated by tools/gen_brief_pattern.py (seed 20220413); do not edit by hand.
Each row is (x1, y1, x2, y2), offsets from the keypoint centre.
"""

import numpy as np

PATTERN = np.array([
    (-9, -6, 0, -5),
    (-5, -5, -1, -8),
    (4, 10, -3, 6),
    (9, 0, -6, -5),
    (0, 10, -6, -7),
    (0, -5, 7, 10),
    (3, 5, -2, -1),
    (1, 2, -3, -10),
    (0, -4, -5, -5),
    (7, -4, -5, 2),
    (-6, -10, -5, -4),
    (-1, 1, 1, -12),
    (8, -6, 0, 4),
    (5, -4, 11, 4),
    (0, 2, -5, -1),
    (-1, -6, -5, 2),
    (-1, -12, -7, -7),
    (3, 2, -6, -3),
    (-8, 7, -6, -5),
    (2, 6, 2, -1),
    (-4, -2, -1, 1),
    (-2, 2, 2, -9),
    (-4, 6, 6, 4),
    (1, 12, 10, -1),
    (0, 10, 1, 3),
    (3, 5, 1, 1),
    (-10, -2, 1, 4),
    (7, -2, -11, -4),
    (5, 1, 7, 4),
    (-3, 0, -8, 2),
    (-2, 4, -2, 2),
    (-12, -4, 8, -4),
    (-9, 6, -2, 10),
    (3, -2, -1, -3),
    (-2, -4, -7, -6),
    (-2, 3, -11, -1),
    (0, 4, -3, -5),
    (5, -8, 3, -4),
    (-2, 6, 1, 6),
    (9, 2, 3, -8),
    (0, -3, -1, -3),
    (3, -8, -2, -1),
    (-2, -3, 0, -1),
    (-3, 5, 10, -5),
    (0, 5, 2, 6),
    (-6, -5, -5, 4),
    (4, 0, -11, 1),
    (4, -4, 4, 7),
    (3, 3, -7, 1),
    (-2, -5, -1, -8),
    (6, 2, 4, -5),
    (6, 9, 0, 1),
    (1, 12, -8, -4),
    (3, -2, -2, 10),
    (6, 7, -5, 5),
    (0, 0, 5, -4),
    (2, -3, 4, 0),
    (10, 3, 2, -10),
    (5, -4, 7, 2),
    (0, 8, 1, 8),
    (-10, 1, 1, 2),
    (-10, -4, 5, 1),
    (6, 9, 6, 1),
    (6, 7, 0, 3),
    (-8, -3, -4, 2),
    (-1, 9, -5, -4),
    (-3, 5, -4, -3),
    (-2, 0, -7, -3),
    (-9, -2, -10, 4),
    (-3, 4, 8, -3),
    (-7, -1, 3, -5),
    (0, 5, 2, 8),
    (0, 0, -5, -5),
    (-4, 9, 4, -3),
    (-10, -1, -1, 6),
    (3, -6, -9, 9),
    (-5, 2, 4, -8),
    (-4, -12, -8, 4),
    (5, -7, 0, -5),
    (-3, 2, -5, 1),
    (-2, 0, 2, 8),
    (2, -4, -2, 5),
    (6, 5, -9, 1),
    (-3, 2, -3, 0),
    (-2, -12, -1, 6),
    (6, 6, 4, 3),
    (-6, 5, -9, -1),
    (-1, -7, 5, -12),
    (-7, 7, -3, 2),
    (1, 0, 4, 8),
    (-3, 1, 1, 4),
    (1, -7, 1, -2),
    (0, 13, 0, -8),
    (7, -7, -5, 4),
    (12, 0, 0, 5),
    (-5, -10, -6, 2),
    (1, -9, 2, -3),
    (3, -3, -6, 6),
    (5, -6, 3, -6),
    (6, -5, -8, 7),
    (6, 9, 6, -5),
    (-1, -6, -1, -2),
    (0, 2, 6, 5),
    (-1, -12, 5, 1),
    (-5, -2, 5, 9),
    (-9, -6, 8, -2),
    (-6, -1, 5, -6),
    (-4, -4, 5, 1),
    (-1, 0, -11, 4),
    (2, 6, -12, 0),
    (11, 4, -6, 5),
    (-3, -4, 2, 3),
    (-8, -4, 1, 9),
    (-9, 0, 8, 4),
    (2, -6, -5, -5),
    (5, -3, -5, 9),
    (-3, 6, 1, 12),
    (3, 1, 1, -1),
    (0, 5, -5, -9),
    (3, -7, -2, -4),
    (-4, 0, -5, 6),
    (-1, -3, 9, 3),
    (0, -4, 2, -2),
    (-3, 10, -4, -6),
    (7, 0, 10, -8),
    (-8, 8, -1, -10),
    (-11, 0, -5, 1),
    (5, 4, 9, 6),
    (-1, 7, 7, 0),
    (2, -1, -1, -9),
    (-6, 2, 1, -1),
    (-2, -2, -2, 2),
    (-3, 11, -5, 6),
    (-1, -1, 9, -5),
    (-4, -2, 0, 0),
    (-3, 1, -2, -8),
    (10, 0, -4, 3),
    (-3, 10, -7, 1),
    (-6, -9, 4, 2),
    (-5, 0, -7, -1),
    (-4, -11, 0, -2),
    (-5, -3, -4, -11),
    (3, 4, -10, -2),
    (2, -2, -4, 1),
    (-2, -5, -4, -2),
    (-4, 5, 5, -10),
    (-2, 3, 3, 0),
    (-8, -3, 8, -5),
    (0, 6, -2, -4),
    (2, 0, 0, 2),
    (5, 4, -4, 0),
    (6, -7, 8, 1),
    (3, 7, 3, -10),
    (9, -2, -7, 4),
    (-6, -5, -6, 1),
    (-6, 8, -1, 4),
    (6, 9, -5, -5),
    (0, -1, -6, -7),
    (1, 5, -6, -4),
    (-9, -5, 7, 3),
    (-6, 2, -3, 9),
    (5, 1, 5, 3),
    (4, 0, 2, -4),
    (6, 6, 7, -3),
    (-1, -2, -4, -1),
    (1, -5, 0, -7),
    (0, -11, 1, -2),
    (2, -4, -5, -4),
    (2, 6, -12, -5),
    (0, -2, 0, 8),
    (-4, -5, 3, 8),
    (-7, 4, 6, -3),
    (-4, 8, -5, 8),
    (1, 7, 0, -8),
    (-10, 5, 1, 0),
    (-2, 4, 3, 6),
    (-1, 3, 6, 2),
    (3, 4, 2, -3),
    (4, 7, -1, 2),
    (0, 12, 9, 2),
    (2, -10, 0, 2),
    (-4, 7, -3, 4),
    (5, 2, -8, -5),
    (0, 2, 0, 13),
    (-4, 1, -6, 11),
    (0, -7, 7, -7),
    (7, -3, 8, 4),
    (5, 8, 0, 1),
    (-7, -6, -11, -1),
    (4, 0, 2, -2),
    (-10, 4, 2, 7),
    (5, 0, 5, -8),
    (-2, -7, 1, -4),
    (-8, -6, -4, -2),
    (-8, 3, -3, 7),
    (-12, -4, -5, 1),
    (-12, -2, -4, -2),
    (-6, 5, 2, -3),
    (6, -5, 4, 0),
    (1, -3, -6, 2),
    (2, 0, -7, 6),
    (7, -4, 0, -3),
    (2, 0, 1, -2),
    (4, -6, -9, -7),
    (5, -10, -6, 5),
    (9, 0, 0, -2),
    (2, -6, 4, -7),
    (5, -12, 2, 1),
    (0, 9, 3, -6),
    (1, 10, 4, -5),
    (-1, 5, 2, 6),
    (6, -7, -9, -5),
    (6, 7, -3, 4),
    (-4, -11, 6, -2),
    (8, 0, -3, -5),
    (1, -5, 9, -3),
    (5, 0, 0, 0),
    (-5, -10, -1, -5),
    (4, 0, -3, -2),
    (2, 3, 2, -6),
    (7, -6, 8, 1),
    (-7, 7, -3, 6),
    (7, 8, -2, 10),
    (1, 1, -10, 5),
    (-5, 9, -3, 2),
    (0, 6, 5, 4),
    (3, 2, 6, -6),
    (3, 4, 3, -6),
    (1, -2, 0, -5),
    (-11, 4, 0, -11),
    (1, -1, -2, -4),
    (-9, 0, -5, 4),
    (7, 7, 10, -2),
    (-3, -1, -4, -2),
    (-3, -4, -9, 6),
    (-4, 0, 4, 3),
    (-7, -1, 6, -8),
    (2, 3, 3, 6),
    (3, 6, 2, 12),
    (3, 4, -2, -4),
    (2, -4, -8, -6),
    (3, -5, 9, 4),
    (3, -5, 2, -9),
    (-2, 6, 5, 0),
    (-5, -3, 6, -10),
    (2, -1, -7, -6),
    (0, -1, -5, 4),
    (-10, -5, 3, -5),
    (0, 4, -6, 4),
    (1, 8, 2, 1),
    (-9, 7, -5, 6),
    (1, 4, 2, 3),
    (-3, -4, -5, -9),
    (9, 7, -3, -6),
    (0, -8, 4, 1),
    (0, -4, -5, -1),
], dtype=np.int64)
