"""Conceptual scaling errors of binary data scalings."""

from .context import (FormalContext, ObjectMap, apposition, closure_attributes, closure_objects,
                      derive_attributes, derive_objects, induced_subcontext, is_extent, sigma_context)
from .lattice import (DEFAULT_CAP, ClosureSystem, Concept, ConceptLattice, IntractableError,
                      concepts, count_concepts, export_dot, extents, family_context,
                      intersection_close, meet_irreducibles)
from .measure import (ScaleMeasure, Verdict, canonical_representation, conjunctive_normalform,
                      equivalent, finer_than, hierarchy_join, is_scale_measure, join_complement,
                      reflected_extents)
from .bmf import (BinaryFactorization, BmfParams, bmf_factorize, boolean_product, default_rank,
                  frobenius_error, hamming_percent, mismatches)
from .error import (ConceptualError, ErrorReport, apposition_measure, attribute_split,
                    conceptual_scaling_error, consistent_part_measure, error_report, format_table)
from .io import parse_cxt, read_cxt, save_cxt, scale_csv, write_cxt
from .datasets import load_fixture

__version__ = "0.1.0"
