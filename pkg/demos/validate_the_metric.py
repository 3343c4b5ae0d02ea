"""Rank-correlate predicted complexity against measured random-policy difficulty.

Runs the full validation protocol on the canonical 15-task mixed suite, with
lighter sampling than the shipped defaults so it finishes in about two
minutes.  Difficulty is measured by rolling a random policy on every task and
ranking mean returns; the combined metric should track that ranking clearly
better than the parameter-count baseline, which sees team size but not
coordination structure.
"""

from coordlearn import MetricConfig, validate_metric, validation_suite


def main() -> None:
    suite = validation_suite(0)
    print(f"validating on {len(suite)} tasks (both families)...")
    report = validate_metric(suite, MetricConfig(), episodes=60, rollouts_per_task=5)

    print("\ntask                               C      mean return   difficulty rank")
    for score, record in sorted(report.pairs, key=lambda p: p[1].difficulty_rank):
        spec = record.task
        label = f"{spec.family.value:<16} N={spec.num_agents} G={spec.num_goals}"
        print(
            f"  {label:<30} {score.combined:>6.3f}   {record.mean_return:>10.2f}"
            f"   {record.difficulty_rank:>8}"
        )

    print(f"\nrho combined        = {report.rho_combined:+.3f} (p={report.p_value_combined:.4f})")
    print(f"rho entropy only    = {report.rho_entropy_only:+.3f}")
    print(f"rho interference    = {report.rho_interference_only:+.3f}")
    print(f"rho parameter count = {report.rho_parameter_based:+.3f}")


if __name__ == "__main__":
    main()
