"""Pauli-string algebra: words, sums, products, powers and the word census.

The register-wide operators are stored symbolically as bit-mask pairs, so
products and powers are exact and cheap.  This is the substrate everything
else (Hamiltonians, moments, commutator gradients) is built on.
"""

import numpy as np

from qmx import (
    PauliSum,
    PauliWord,
    commutator,
    sum_mul,
    sum_power,
    truncate_by_coeff,
    word_mul,
)

# --- single words -----------------------------------------------------------
x0 = PauliWord.parse("X0", 1)
y0 = PauliWord.parse("Y0", 1)
phase, product = word_mul(x0, y0)
print(f"X0 * Y0 = {phase} * {product}        # the familiar XY = iZ")

word = PauliWord.parse("X0 Z2 Y3", 4)
print(f"weight of {word}: {word.weight}, round-trips: "
      f"{PauliWord.parse(word.render(), 4) == word}")

# --- sums and products ------------------------------------------------------
h = PauliSum(1, {PauliWord.parse("Z0", 1): 1.0, PauliWord.parse("X0", 1): 1.0})
square = sum_mul(h, h)
print(f"\n(Z0 + X0)^2 = {square}            # cross terms cancel exactly")

print(f"[Z0, X0] = {commutator(PauliSum(1, {PauliWord.parse('Z0', 1): 1.0}), PauliSum(1, {PauliWord.parse('X0', 1): 1.0}))}")

# --- powers and the distinct-word census -------------------------------------
powers = sum_power(h, 6)
seen = set()
print("\npower  terms  cumulative distinct words")
for n, p in enumerate(powers, start=1):
    seen |= set(p.terms.keys())
    print(f"{n:5d}  {len(p):5d}  {len(seen):10d}")
print("the census saturates: higher powers recycle the same words")

# --- coefficient thresholding -------------------------------------------------
noisy = PauliSum(2, {
    PauliWord.parse("Z0", 2): 0.5,
    PauliWord.parse("X0 X1", 2): 1e-6,
    PauliWord.parse("Z0 Z1", 2): -0.25,
})
kept, dropped = truncate_by_coeff(noisy, 1e-5)
print(f"\nthresholding at 1e-5 kept {len(kept)} terms, dropped {dropped}")
