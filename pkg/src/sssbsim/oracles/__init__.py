from .dense import DenseState, dense_apply_channel
from .percolation import ClusterPartition, percolation_chi, percolation_clusters

__all__ = [
    "DenseState",
    "dense_apply_channel",
    "ClusterPartition",
    "percolation_chi",
    "percolation_clusters",
]
