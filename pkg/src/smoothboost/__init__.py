"""Smooth boosting with communication-frugal distributed entities.

The package pairs a centralized smooth-boosting loop with a star-network
simulation of the same algorithm, where weight normalization and the
smoothness projection run through counted messages instead of pooled data.
"""

from .boost import (BoostConfig, Distribution, RoundRecord, auto_round_count,
                    error_rate, is_smooth, mw_update, project_smooth,
                    relative_entropy, run_smooth_boost, smoothness_cap)
from .data import (LabeledDataset, ParseError, Shards, dataset_to_csv,
                   dataset_to_libsvm, gen_long_servedio, inject_label_noise,
                   parse_libsvm, partition, split_train_test)
from .distboost import (ProtocolReport, entity_sample, multinomial_allocate,
                        report_to_csv, run_dist_adaboost, run_dist_smooth_boost)
from .netsim import CENTER, CommStats, Network, TopologyError, entity, payload_words
from .projection import (ShardedWeights, distributed_median,
                         distributed_normalize, distributed_project)
from .weaklearn import (Stump, VotedEnsemble, ensemble_from_csv, ensemble_to_csv,
                        predict, predict_dataset, predict_ensemble, train_stump,
                        vote_sign, weighted_error)

__all__ = [
    "BoostConfig", "Distribution", "RoundRecord", "auto_round_count",
    "error_rate", "is_smooth", "mw_update", "project_smooth",
    "relative_entropy", "run_smooth_boost", "smoothness_cap",
    "LabeledDataset", "ParseError", "Shards", "dataset_to_csv",
    "dataset_to_libsvm", "gen_long_servedio", "inject_label_noise",
    "parse_libsvm", "partition", "split_train_test",
    "ProtocolReport", "entity_sample", "multinomial_allocate",
    "report_to_csv", "run_dist_adaboost", "run_dist_smooth_boost",
    "CENTER", "CommStats", "Network", "TopologyError", "entity", "payload_words",
    "ShardedWeights", "distributed_median", "distributed_normalize",
    "distributed_project",
    "Stump", "VotedEnsemble", "ensemble_from_csv", "ensemble_to_csv",
    "predict", "predict_dataset", "predict_ensemble", "train_stump",
    "vote_sign", "weighted_error",
]

__version__ = "0.1.0"
