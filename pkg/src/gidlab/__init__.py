"""Geometric infinite divisibility: c.f. algebra, samplers and attraction experiments."""
__version__ = "0.1.0"

from ._backend import current as backend
from .cf_core import (CharFn, ExponentDescriptor, ExponentKind, ExponentSum, GridSpec,
                      PoleError, check_admissible, geometric_compound_cf,
                      gid_necessary_check, gv_invert, gv_transform, id_cf, linnik_cf,
                      psd_witness_search, semistable_epsilon_max, un_cf)
from .samplers import (Component, GeometricLaw, RandomStream, SampleBatch,
                       sample_geometric, sample_geometric_sum, sample_linnik,
                       sample_mittag_leffler, sample_positive_stable, sample_sym_stable,
                       sample_un)
