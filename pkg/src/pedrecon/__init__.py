"""Pedigree reconstruction from extant haplotypes via IBD tract lengths."""

from pedrecon.pedigree import Individual, Pedigree, Sex
from pedrecon.reconstruct import ReconstructConfig, reconstruct
from pedrecon.simulator import SimParams, simulate

__all__ = ["Individual", "Pedigree", "Sex", "ReconstructConfig", "reconstruct", "SimParams", "simulate"]
