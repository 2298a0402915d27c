"""Triangle hitting on geometric intersection graphs: branching, twin
merging, tree-decomposition DP, structural analyzers and hardness gadgets."""

from .graph import FVS, PSEUDOFOREST, TH, Graph, Problem, ProblemProfile

__all__ = ["Graph", "Problem", "ProblemProfile", "TH", "FVS", "PSEUDOFOREST"]
__version__ = "0.1.0"
