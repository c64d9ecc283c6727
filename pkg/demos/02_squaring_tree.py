"""
Growing a constellation by partition and squaring
=================================================

Start from 4-PAM, split it into two cosets with four times the distance,
square each coset, and repeat on every branch.
"""

from mbmsq.squaring import base_pam, build_constellation, partition2, scalar_set, square

pam = base_pam(4)
a, b = partition2(pam)
print("4-PAM", pam.values, "d =", pam.min_dist)
print("cosets", a.values, b.values, "d =", a.min_dist)

# a small set partitioned and squared: d(U) = min(d(T), 2 d(S))
S = scalar_set([0, 1, 2, 3])
U = square(partition2(S))
print(U.elements.tolist(), "d(U) =", U.min_dist)

# two stages from 4-PAM give 16 complex 2-vectors
A = build_constellation(4, 2)
for label, leaf in zip(A.labels, A.branches):
    print(label, leaf.elements.tolist(), "d =", leaf.min_dist)
print("union d =", A.min_dist, " per branch d =", A.branch_min_dist)
print(A.vectors)

# with 2-PAM every stage has singleton branches: two antipodal vectors
print(build_constellation(2, 3).vectors)
