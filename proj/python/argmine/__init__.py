"""Python bindings for the argmine experiment framework."""

try:
    from argmine._argmine import (  # installed layout
        aggregate_seeds,
        apply_threshold,
        average_ranks,
        cache_directory,
        calibrate_threshold,
        chi_squared_sf,
        cls_to_score,
        combine_pvalues_bonferroni,
        combine_pvalues_fisher,
        compute_truncation_length,
        corpus_summary,
        krippendorff_alpha,
        macro_f1,
        mean_std,
        pearson,
        pronoun_baseline,
        run_experiment_config,
        spearman,
        student_t_two_sided_p,
        tokenize,
        welch_t_test,
    )
except ImportError:
    from _argmine import (  # build-tree layout (module on PYTHONPATH)
        aggregate_seeds,
        apply_threshold,
        average_ranks,
        cache_directory,
        calibrate_threshold,
        chi_squared_sf,
        cls_to_score,
        combine_pvalues_bonferroni,
        combine_pvalues_fisher,
        compute_truncation_length,
        corpus_summary,
        krippendorff_alpha,
        macro_f1,
        mean_std,
        pearson,
        pronoun_baseline,
        run_experiment_config,
        spearman,
        student_t_two_sided_p,
        tokenize,
        welch_t_test,
    )

__all__ = [
    "aggregate_seeds",
    "apply_threshold",
    "average_ranks",
    "cache_directory",
    "calibrate_threshold",
    "chi_squared_sf",
    "cls_to_score",
    "combine_pvalues_bonferroni",
    "combine_pvalues_fisher",
    "compute_truncation_length",
    "corpus_summary",
    "krippendorff_alpha",
    "macro_f1",
    "mean_std",
    "pearson",
    "pronoun_baseline",
    "run_experiment_config",
    "spearman",
    "student_t_two_sided_p",
    "tokenize",
    "welch_t_test",
]
