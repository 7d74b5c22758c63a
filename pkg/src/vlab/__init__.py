"""Fourier analysis on bounded Vilenkin groups: transforms, T-means, maximal operators."""

from .group import (Basis, Cylinder, DenseCapError, build_basis, cylinders, digits_to_index,
                    group_add, group_sub, index_to_digits)
from .spectral import (GridFunction, SpectralFunction, character, convolve, dirichlet_dense,
                       dirichlet_eval, rademacher, vft_forward, vft_inverse, vft_naive)
from .summability import (KINDS, AbelCheck, WeightSequence, abel_identity_check, condition_checks,
                          fejer_mean, norlund_mean, parse_weight, t_kernel, t_mean, weights)
from .operators import (AtomicDecomposition, Martingale, domination_bound, hp_atomic_bound,
                        hp_norm, lp_norm, maximal_fejer, maximal_function, maximal_t,
                        validate_atom, weak_lp)
from .counterexample import (ChainViolation, CounterexampleSpec, divergence_ratio, find_alphas,
                             lower_bound_chain, term_I_bound, term_II_exact)
from .config import ExperimentConfig, parse_config

__all__ = [name for name in dir() if not name.startswith("_")]
