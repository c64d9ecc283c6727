"""
How rare are rank-one difference matrices?
==========================================

The slope of the union bound at high SNR is set by the smallest rank of
any difference matrix.  Sweeping all block pairs shows how few pairs
reach that minimum, and the bound shows where they start to dominate.
"""

import numpy as np

from mbmsq import build_constellation, build_shortened_rs, field_new, proposed_set
from mbmsq.link_analysis import energy_scale, loglog_slope, pair_classes, pair_geometry, rank_profile, union_bound

s = proposed_set(build_shortened_rs(field_new(4), 4, 2), build_constellation(2, 3))
classes = pair_classes(s)
prof = rank_profile(classes)
print(prof.histogram, "of", prof.total_pairs, "pairs;", len(classes.count), "distinct geometries")

# the lone rank-one pair: same codeword, antipodal symbol vectors
print(pair_geometry(s, 0, 1))

snr = np.arange(0, 61, 3.0)
rho = 10 ** (snr / 10)
c2 = energy_scale(s)
total = union_bound(classes, rho, 4, energy_scale_sq=c2)
rank1 = union_bound(classes, rho, 4, energy_scale_sq=c2, rank_filter=lambda r: r == 1)
slope = np.r_[np.nan, loglog_slope(rho, total)]
for row in zip(snr, total, rank1 / total, slope):
    print("%5.1f dB  bound %.2e  rank-one share %.3f  slope %6.2f" % row)
