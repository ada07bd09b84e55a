"""Social-influence measurements on repost cascades and retweet-prediction experiments."""

from .cascade import Cascade, CascadeSnapshot, ChainRecord, build_cascades, snapshot
from .community import CommunityPartition, louvain, modularity
from .features import FEATURE_NAMES, GROUPS, LrcqParams, feature_vector, featurize, lrcq
from .graph import RepostEvent, SocialGraph, build_graph
from .sampling import Instance, extract_instances, sample_ratio, top_retweeters

__version__ = "0.1.0"

__all__ = [
    "Cascade", "CascadeSnapshot", "ChainRecord", "build_cascades", "snapshot",
    "CommunityPartition", "louvain", "modularity",
    "FEATURE_NAMES", "GROUPS", "LrcqParams", "feature_vector", "featurize", "lrcq",
    "RepostEvent", "SocialGraph", "build_graph",
    "Instance", "extract_instances", "sample_ratio", "top_retweeters",
]
