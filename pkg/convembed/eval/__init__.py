from convembed.eval.statistics import MAEStats, PearsonResult, mae_stats, pearson, r_squared
from convembed.eval.references import ReferenceKind, ReferenceSet, build_reference_sets, reference_distance
from convembed.eval.concrete.kernel_ridge import RBFKernelRidge
from convembed.eval.regression import RegressionResult, RegressorConfig, lodo_regression
from convembed.eval.pca import PCAResult, pca2
from convembed.eval.report import EvalConfig, EvalReport, embed_corpus, evaluate, evaluate_embeddings
