"""Finite-resolution Walsh-Fourier analysis with executable sparse bounds."""

from .dyadic import UNIT, DyadicInterval, FrequencyInterval, average, resolution
from .experiments import cww_scan, lower_bound_lerner, q_scaling_table, zygmund_scan
from .multipliers import (AtomRq1, MultiplierSymbol, apply, atomize_marcinkiewicz, induce,
                          marcinkiewicz_norm, tile_partition)
from .orlicz import luxemburg, supinf_comparison
from .sparse import (KeyDecomposition, SparseCertificate, StoppingCollection, check_sparseness,
                     check_stopping_condition, key_decomposition, maximal_intervals,
                     sparse_certify_composition, sparse_certify_lambda, sparse_certify_multiplier,
                     sparse_certify_square, sparse_form)
from .squares import GoodCollection, MartingaleGrid, reduce_s_lambda, s_lambda, square_function
from .tiles import Tile, projection_tile_expansion, signed_haar_factor, wave_packet
from .walsh import conditional_expectation, haar_forward, walsh_forward, walsh_function, walsh_inverse
from .weights import a1_characteristic, ap_characteristic, rh_characteristic, weighted_norm_ratio

__version__ = "0.1.0"
