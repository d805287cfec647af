"""Numerical toolkit for spectral stability of perturbed Dirac and Klein-Gordon operators.

The library turns explicit resolvent-estimate constants into executable
spectral certificates (stability declarations and eigenvalue-enclosure
disks) and cross-validates them at desk scale by discretizing the free
operators as Fourier multipliers on a periodic box, assembling the
perturbed operator, and scanning the Birman-Schwinger operator norm over
the complex plane.
"""

from .clifford import CliffordRep, build_clifford, anticommutator_defect, dirac_symbol
from .potential import PotentialSpec, Factorization, polar_factorize
from .weights import WeightSpec, NormResult, weight_eval, dyadic_norm, weighted_sup_norm, morrey_norms
from .enclosure import ConstantsReport, Certificate, DiskPair, eval_constants, certify, enclosure_disks
from .gridops import GridSpec, FieldOnGrid, apply_free_operator, apply_free_resolvent, assemble_perturbed, eigenvalues
from .birman_schwinger import BSScan, bs_apply, bs_norm, bs_scan, bs_dense
from .bench import BenchReport, run_bench, uniformity_probe

__version__ = "0.1.0"
