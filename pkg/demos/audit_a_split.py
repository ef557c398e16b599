#!/usr/bin/env python3
"""Audit two split files: one subject-disjoint, one leaky.

Writes a manifest plus two assignments into ./audit_demo/ and then reads them
back the way the CLI does, so the files double as hand-inspectable examples
of the on-disk formats.
"""
from pathlib import Path

from cohortsplit.audit import audit_split, compare_counts
from cohortsplit.manifest import dump_doc, write_assignment, write_manifest
from cohortsplit.splitting import SplitRatios, split_by_subject, split_random_by_scan
from cohortsplit.synth import SynthConfig, generate

OUT = Path("audit_demo")

config = SynthConfig(
    n_subjects=40,
    visits_per_subject=(2, 5),
    feature_dim=4,
    sigma_subject=10.0,
    sigma_stage=1.0,
    sigma_noise=0.5,
    transition_prob=0.08,
    initial_stage_distribution=(0.4, 0.35, 0.25),
)
cohort, _ = generate(config, seed=7)
OUT.mkdir(exist_ok=True)
(OUT / "manifest.csv").write_text(write_manifest(cohort))

ratios = SplitRatios(train=0.6, val=0.15, test=0.25)
for name, assignment in (
    ("clean", split_by_subject(cohort, ratios, seed=7)),
    ("leaky", split_random_by_scan(cohort, ratios, seed=7)),
):
    text, meta = write_assignment(assignment, cohort)
    (OUT / f"{name}.csv").write_text(text)
    (OUT / f"{name}.meta.json").write_text(meta)
    report = audit_split(cohort, assignment)
    verdict = "subject-disjoint" if report.subject_disjoint else (
        f"LEAKY: {len(report.leaked_subjects)} subjects on both sides"
    )
    print(f"{name:<6} ({assignment.scheme}): {verdict}")
    mismatches = compare_counts(
        report, {"scans": {"test": report.scan_counts["test"]}}
    )
    assert mismatches == []  # counts agree with themselves, of course

print()
print(f"files in {OUT}/ — same checks via the CLI:")
print(f"  cohortsplit audit --manifest {OUT}/manifest.csv "
      f"--assignment {OUT}/leaky.csv --forbid-leakage  # exits 2")
print()
print("full report for the leaky split:")
print(dump_doc(audit_split(cohort, split_random_by_scan(cohort, ratios, 7)).to_doc()), end="")
