"""Laplacian spectra, Grone-Merris margins and the quadratic eigenvalue
problem behind 1-regular semi-bipartite graphs."""
from .graph import (Creation, DegreeData, EdgeListError, Graph, GraphError,
                    SemiBipartitePartition, build_graph, build_semibipartite,
                    build_threshold, degree_data, laplacian, parse_edge_list,
                    read_edge_list)
from .linalg import (ConvergenceError, MajorizationReport, Spectrum, SymmetricMatrix,
                     det_diag_plus_ones, eigen_symmetric, majorizes)
from .qep import PencilParams, RootSet, companion_roots, find_roots
from .checker import (GMReport, gm_report, gm_report_semibipartite, sweep,
                      verify_main_lemma)

__version__ = "0.1.0"
