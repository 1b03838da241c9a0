"""Distribution of the number of internal equilibria in random multi-player games."""
__version__ = "0.1.0"

from .errors import (AllZero, Degenerate, DomainError, EigenFailure, EqdistError, IllConditioned,
                     NumericOverflow, TooLarge)
from .polynomial import (RealPolynomial, RootTally, count_positive_roots, normalize,
                         positive_root_intervals, sturm_chain, tally_roots_eigen)
from .game import (GapVector, PayoffTable, build_game_polynomial, count_internal_equilibria,
                   equilibrium_frequencies, gaps)
from .sampling import (DistributionSpec, EquilibriumDistribution, Family, estimate_distribution,
                       estimate_moments, sample_gaps)
from .closed_form import (IntegralEstimate, MixedRootPoint, RootConfiguration,
                          distribution_closed, p_config, p_m_closed)
from .signs import (BoundSet, SignBias, SignChangeTable, descartes_bounds, entropy_bounds,
                    p_kn_explicit, p_kn_initial, p_kn_oracle, p_kn_recursive, p_kn_symmetric,
                    partial_binomial_sums)
from .approx import ApproxResult, expected_asymptotic, poisson_approx
from .estimators import EquilibriumCounter
