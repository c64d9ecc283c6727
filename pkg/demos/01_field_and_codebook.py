"""
MAP indices as field elements
=============================

Each mirror activation pattern is labelled by an element of GF(2^m); the
element's polynomial-basis bits, read as an integer, are the MAP index.
A shortened Reed-Solomon code over that field then picks which sequences
of MAP indices may be sent over N channel uses.
"""

from mbmsq import build_shortened_rs, field_new, hamming_spectrum, map_indices_to_mirror_bits

# GF(8) from x^3 + x + 1
F = field_new(3)
for e in F.elements():
    print(f"{e.value}  {e.poly_str():>9}  {' '.join(map_indices_to_mirror_bits(e.value, 3))}")

# multiplication runs through log/antilog tables
X, X2 = F(2), F(4)
print("X * X^2 =", (X * X2).poly_str())

# a (4,2) code: 64 codewords of four MAP indices each
code = build_shortened_rs(F, 4, 2)
print(len(code), "codewords, parent RS", code.parent_params)
print(code.codewords[:4])

# MDS: every pair of codewords differs in at least N-K+1 = 3 uses
print(hamming_spectrum(code))
print(hamming_spectrum(build_shortened_rs(field_new(4), 4, 2)))
