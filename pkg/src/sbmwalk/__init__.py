"""Random-walk embeddings (DeepWalk, node2vec) on stochastic block models."""
from ._accel import USE_NUMBA
from .sbm import (BlockModel, CommunityAssignment, Graph, ModelError, block_assignment,
                  build_block_model, edge_probability_matrix, make_assignment,
                  membership_matrix, sample_graph)

__all__ = [
    "USE_NUMBA", "BlockModel", "CommunityAssignment", "Graph", "ModelError",
    "block_assignment", "build_block_model", "edge_probability_matrix", "make_assignment",
    "membership_matrix", "sample_graph",
]
__version__ = "0.1.0"
