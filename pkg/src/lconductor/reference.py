"""Class-group data for the discriminants -10000003 ... -10000099.

Each entry is ``q: (h, invariant factors, usable character count)``; the
usable count for 10000031 is not tabulated (``None``).
"""

REFERENCE_GROUPS = {
    10000003: (706, (706,), 352),
    10000004: (1648, (412, 2, 2), 820),
    10000007: (3660, (3660,), 1829),
    10000011: (816, (204, 2, 2), 404),
    10000015: (1134, (1134,), 566),
    10000019: (1275, (1275,), 637),
    10000020: (928, (232, 2, 2), 460),
    10000023: (2064, (258, 2, 2, 2), 1024),
    10000024: (990, (330, 3), 494),
    10000027: (282, (282,), 140),
    10000031: (5426, (5426,), None),
    10000036: (876, (876,), 437),
    10000039: (1912, (956, 2), 954),
    10000043: (618, (618,), 308),
    10000047: (1512, (756, 2), 754),
    10000051: (742, (742,), 370),
    10000052: (1692, (846, 2), 844),
    10000055: (3584, (896, 2, 2), 1788),
    10000056: (1480, (370, 2, 2), 736),
    10000059: (968, (484, 2), 482),
    10000063: (1722, (1722,), 860),
    10000072: (724, (724,), 361),
    10000079: (4147, (4147,), 2073),
    10000083: (416, (208, 2), 206),
    10000084: (1364, (682, 2), 680),
    10000087: (1076, (1076,), 537),
    10000088: (1512, (126, 6, 2), 752),
    10000091: (1382, (1382,), 690),
    10000095: (2928, (732, 2, 2), 1460),
    10000099: (640, (320, 2), 318),
}

# first zero of L(s, chi_d) above the real axis for d = -175990483
KRONECKER_D = -175990483
KRONECKER_ZERO = (
    "0.000475243995420162900876755752675244684185134886243243424044942732648462812721184470556544512670480839630"
)
