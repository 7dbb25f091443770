"""Near-field localization with dynamic metasurface antennas."""

__version__ = "0.1.0"

from .geometry import (ArrayLayout, PolarPosition, SPEED_OF_LIGHT,
                       cartesian_error_m, element_source_distance,
                       fraunhofer_distance, phase_delay, source_distances,
                       uniform_layout, wavelength)
from .signal_model import (ChannelRealization, SnapshotBatch, WaveguideModel,
                           build_channel, build_waveguide_matrix,
                           default_waveguide, noise_power_from_snr_db,
                           sample_snapshots)
from .dma import (DmaWeights, LORENTZIAN, PHASE_ONLY, apply_weights,
                  load_weights_csv, project_lorentzian, random_weights,
                  save_weights_csv, tune_weights)
from .likelihood import (DmaObjective, FdObjective, GridSearchResult,
                         LikelihoodSurface, SearchGrid, default_search_grid,
                         dma_objective, effective_steering, fd_objective,
                         grid_search_mle, save_surface_csv, steering_vector)
from .alternating import (AlternatingConfig, AlternatingTrace, run_alternating,
                          save_trace_csv)
from .exceptions import (ConfigurationError, DegenerateCandidateError,
                         EstimationFailureError)
