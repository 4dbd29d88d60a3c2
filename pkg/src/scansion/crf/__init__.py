"""Linear-chain conditional random fields."""

from .features import (BOS, EOS, FeatureTemplate, char_preset, extract_features,
                       meter_preset, pos_preset)
from .joint import SEPARATOR, join, join_sequences, join_tasks, project
from .model import (CrfModel, EmptySequence, LabeledSequence, LabelOutsideSet,
                    UnlabeledSequence, dumps_model, forward_backward, log_partition,
                    loads_model, marginals, pairwise_marginals, sequence_score, tag,
                    tag_many, viterbi)
from .train import (EmptyData, EpochStats, TrainConfig, TrainResult, build_attributes,
                    evaluate, nll_and_gradient, train, train_with_history)

__all__ = [
    "BOS", "EOS", "FeatureTemplate", "char_preset", "extract_features", "meter_preset",
    "pos_preset", "SEPARATOR", "join", "join_sequences", "join_tasks", "project",
    "CrfModel", "EmptySequence", "LabeledSequence", "LabelOutsideSet", "UnlabeledSequence",
    "dumps_model", "forward_backward", "log_partition", "loads_model", "marginals",
    "pairwise_marginals", "sequence_score", "tag", "tag_many", "viterbi", "EmptyData",
    "EpochStats", "TrainConfig", "TrainResult", "build_attributes", "evaluate",
    "nll_and_gradient", "train", "train_with_history",
]
