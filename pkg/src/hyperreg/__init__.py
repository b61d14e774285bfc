"""Regularity, counting and embedding tools for 3-partite simplicial complexes."""
from importlib.metadata import PackageNotFoundError, version

from .core import (Complex, Hypergraph3, KPartiteGraph, clique_pattern, close_complex, complete_complex,
                   load_complex, parse_complex, parse_hypergraph, serialize_complex, serialize_hypergraph)
from .counting import (count_copies, count_extensions, count_graph_copies, extension_counts,
                       predicted_count, predicted_extension)
from .density import check_d_delta_regular, check_delta_regular, check_graph_regular
from .embed import Embedding, EmbedFailure, count_ratio_check, embed
from .errors import CapacityError, DomainError, HyperregError, ParseError, StructureError
from .models import HostParams, PatternParams, PlantSpec, planted_host, random_host, random_pattern
from .partition import classify_pairs_triples, reduced_hypergraph, turan_clique
from .pipeline import PipelineConfig, run_pipeline
from .ramsey import exact_ramsey
from .triadreg import Triad, TriadHypergraph, check_complex_regular, check_triad_regular

try:
    __version__ = version("artifact")
except PackageNotFoundError:
    __version__ = "0+unknown"
