"""Experiment protocols: binned adoption, group comparison, imbalance sweep, synthetic data."""

from .binned import BinTable, binned_adoption, metadata_conditionals
from .prediction import group_comparison, imbalance_sweep, replicate_sweep
from .synthetic import SyntheticConfig, generate_synthetic

__all__ = ["BinTable", "binned_adoption", "metadata_conditionals", "group_comparison",
           "imbalance_sweep", "replicate_sweep", "SyntheticConfig", "generate_synthetic"]
