"""Bernoulli restricted Boltzmann machines with interchangeable
model-term samplers (contrastive divergence, exact enumeration, an
emulated quantum annealer), an Ising/Chimera mapping layer, and two
workflows for classifying imbalanced binary record tables."""

from .balance import (Scheme1Report, Scheme2Report, balance_with_synthetic,
                      generate_synthetic, majority_vote, run_scheme1, run_scheme2,
                      save_report)
from .chimera import (ChimeraEmbedding, ChimeraGraph, build_chimera_embedding,
                      embed_problem, resolve_chains, validate_embedding)
from .classify import (NbModel, free_energy_gap, knn_classify, nb_classify, nb_fit,
                       rbm_classify)
from .data import (ClassLabel, Dataset, decode_label, dedupe, load_binary_table,
                   partition_for_undersampling, save_binary_table, split_train_test)
from .errors import (CapacityError, DataFormatError, DimensionError, EmbeddingError,
                     TrainingDivergenceError, TrainingError, UndefinedMetricError)
from .fixtures import bars_and_stripes, imbalanced_fixture
from .ising import (AnnealerClient, IsingProblem, binary_to_bipolar, bipolar_to_binary,
                    ising_energy, rbm_to_ising)
from .metrics import (ConfusionMatrix, accuracy, class_accuracy, confusion, f1,
                      f1_from_scores, precision, recall)
from .model import (RbmParams, apply_update, energy, enumerate_states, free_energy,
                    gradient_data_term, hidden_activation_probs, init_params,
                    load_model, log_likelihood_exact, log_partition, save_model,
                    visible_activation_probs)
from .samplers import (AnnealerEmulatorSampler, CdSampler, ExactSampler,
                       ModelTermEstimate, RemoteAnnealerSampler,
                       annealer_emulator_sample, cd_model_term,
                       exact_model_expectations, gibbs_chain, make_sampler,
                       model_term_from_samples)
from .training import (EpochStats, TrainConfig, TrainerSettings, TrainResult, fit_rbm,
                       reconstruction_error, train)

__version__ = "0.1.0"
