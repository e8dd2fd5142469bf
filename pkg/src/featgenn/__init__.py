"""FeatGeNN: automated feature engineering for tabular classification.

Feature generators are small forward-only convolutional networks over the
feature axis whose pooling step groups correlated positions; their weights are
evolved with a genetic algorithm against cross-validated random-forest f1.
"""

from .dataset import (ColumnMeta, DataError, Dataset, FoldPlan, ScalerStats,
                      append_features, load_csv, make_folds, prepare,
                      select_features, subsample_rows)
from .evolve import (CachingEvaluator, Candidate, EvolutionConfig,
                     EvolutionResult, Population, accept, crossover,
                     evolve_epoch, init_population, mutate, run_evolution,
                     tournament_select)
from .forest import (EvalReport, Forest, ForestConfig, evaluate_cv, f1_score,
                     f1_weighted, fit_forest, predict)
from .netgen import (GeneratorConfig, Genome, GenomeLayout, PoolPlan,
                     build_layout, build_pool_plan, correlation_pool,
                     generated_columns, init_genome, initial_pool_plans,
                     max_pool, network_forward, update_pool_plans)
from .stats import (CorrelationMatrix, CorrelationScores, correlation_matrix,
                    correlation_scores, mrmr_select, mutual_information,
                    pearson)

__version__ = "0.1.0"
