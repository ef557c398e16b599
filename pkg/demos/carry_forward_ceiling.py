#!/usr/bin/env python3
"""How far does label persistence alone carry a last-visit benchmark?

Diagnoses rarely change between consecutive visits, so on a visit-history
split the no-model rule "repeat the subject's previous label" is right
whenever the final pair is stable. Its error count IS the last-visit
transition count — a ceiling any model must beat before claiming to have
learned anything beyond persistence.
"""
from cohortsplit.baselines import carry_forward_predict, majority_class_predict
from cohortsplit.cohort import count_transitions
from cohortsplit.metrics import evaluate
from cohortsplit.splitting import split_by_visit_history
from cohortsplit.synth import generate_reference_cohort

cohort, _ = generate_reference_cohort(seed=1)
stats = count_transitions(cohort)
print(f"{cohort.n_subjects} subjects, {cohort.n_scans} scans, "
      f"{stats.consecutive_pairs} consecutive visit pairs")
print(f"transitions: {stats.total_transitions} total, "
      f"{stats.last_visit_transitions} at the final visit")
for (src, dst), n in sorted(stats.per_transition_kind.items()):
    print(f"  {src.value}->{dst.value}: {n}")

assignment, _ = split_by_visit_history(cohort, 0.15, seed=1)
for predict in (carry_forward_predict, majority_class_predict):
    report = evaluate(predict(cohort, assignment), cohort, assignment)
    errors = report.confusion.total - report.confusion.trace
    print(f"{predict.__name__:<22} accuracy {report.accuracy * 100:5.1f}% "
          f"({errors} errors on {report.n_scored} held-out visits)")

expected = 1 - stats.last_visit_transitions / cohort.n_subjects
print(f"persistence ceiling     accuracy {expected * 100:5.1f}% "
      f"(1 - last-visit transitions / subjects)")
