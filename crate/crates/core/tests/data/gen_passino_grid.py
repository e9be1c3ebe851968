#!/usr/bin/env python3
"""Writes passino_grid.csv: the landscape on the integer grid of [0, 30]^2."""
import math

TERMS = [
    (5, 0.1, 15, 20), (-2, 0.08, 20, 15), (3, 0.08, 25, 10), (2, 0.1, 5, 10),
    (-2, 0.5, 5, 10), (-4, 0.1, 15, 5), (-2, 0.5, 8, 25), (-2, 0.5, 21, 25),
    (2, 0.5, 25, 16), (2, 0.5, 5, 14),
]

with open("passino_grid.csv", "w") as f:
    f.write("x0,x1,value\n")
    for i in range(31):
        for j in range(31):
            v = math.fsum(a * math.exp(-w * ((i - c0) ** 2 + (j - c1) ** 2)) for a, w, c0, c1 in TERMS)
            f.write(f"{i},{j},{v!r}\n")
