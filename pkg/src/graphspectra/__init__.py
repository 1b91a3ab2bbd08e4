"""graphspectra: a spectral laboratory for random-graph matrices.

Build adjacency and Laplacian ensembles from seeded entry laws, compute
their spectra, and check them against independently computed limit laws
(semicircle, the semicircle-normal free convolution) and an exact
small-n circuit-expansion oracle.
"""

__version__ = "0.1.0"

from .circuits import (circuit_summary, edge_pair_matrix, edge_trace,
                       edges_of, enumerate_circuits, expected_trace_moment,
                       has_order3_match, is_vertex_matched)
from .ensemble import (EnsembleConfig, EntryLaw, SymmetricMatrix,
                       build_laplacian, sample_adjacency, sample_entry_stream,
                       sample_laplacian, validate_condition5)
from .errors import (ConfigError, GraphSpectraError, NumericError,
                     PreconditionError)
from .lab import (EXPERIMENT_DOC, EXPERIMENT_NAMES, ExperimentConfig,
                  ExperimentRecord, LawSpec, emit_histogram, replay,
                  run_experiment)
from .limit_laws import (DensityGrid, MomentSequence, free_cumulants_to_moments,
                         fourth_moment_ratio_report, moments_to_free_cumulants,
                         semicircle, semicircle_cdf, semicircle_grid,
                         semicircle_moment, semicircle_moments,
                         semicircle_normal_cumulants, semicircle_normal_density,
                         semicircle_normal_moments, standard_normal_moments)
from .rng import derive_seed, derive_seeds, splitmix64, trial_stream
from .spectra import (ESD, Spectrum, eigenvalues_sym, lambda_max_fast,
                      normalize_adjacency_spectrum,
                      normalize_laplacian_spectrum, scaled_spectrum)
from .stats import (DistanceReport, bl_distance_upper_bound, empirical_moments,
                    ks_distance, row_sum_statistics)
