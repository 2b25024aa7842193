from relnet.evaluation.metrics import ScoredExample, auc_pr, auc_roc, evaluate_scores, read_scores, write_scores

__all__ = ["ScoredExample", "auc_pr", "auc_roc", "evaluate_scores", "read_scores", "write_scores"]
