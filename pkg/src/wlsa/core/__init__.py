from .ext import INF, ExtRational, ext, ext_mul, ext_sum, format_value, parse_value
from .io import dump_structure, load_structure, structure_from_dict, structure_to_dict
from .search import (check_isomorphism, count_homomorphisms, find_homomorphism, is_homomorphism,
                     iter_homomorphisms, opt_value, value_of_map)
from .structure import (CRISP, VALUED, Constraint, FactorGraph, Label, Signature, Structure, ValuedRelation,
                        adjacency_matrix, as_instance, as_template, disjoint_union, edge_label, element_name,
                        factor_graph, finite_part, labels_of_signature, labels_used, matrix_slice, relabel,
                        reorder, require_similar, support)
