"""Training and evaluation driver.

One call = one model trained on the train partition of a supplied assignment,
early-stopped on the val partition, scored on the test partition. All
randomness flows from config.seed, so a rerun of the same config on the same
machine reproduces the same test accuracy.
"""

import copy
import statistics
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .config import MODEL_2D, ExperimentConfig
from .errors import FormatError, IncompatibleAssignment
from .io import (
    CLASS_INDEX,
    LABELS,
    check_compatible,
    dump_doc,
    load_volume,
    parse_assignment,
    parse_manifest,
    predictions_csv,
    report_doc,
    transition_subjects,
)
from .models import build_model

_VIEW_AXIS = {"sagittal": 0, "coronal": 1, "axial": 2}


def _load_inputs(config: ExperimentConfig, scan_ids: list[str]) -> torch.Tensor:
    arrays = []
    shape = None
    for scan_id in scan_ids:
        volume = load_volume(config.image_root, scan_id)
        if shape is None:
            shape = volume.shape
        elif volume.shape != shape:
            raise FormatError(
                f"volume shape mismatch for {scan_id!r}: {volume.shape} vs {shape}"
            )
        if config.model == MODEL_2D:
            axis = _VIEW_AXIS[config.slice_view]
            if config.slice_index >= volume.shape[axis]:
                raise ValueError(
                    f"slice index {config.slice_index} out of range for "
                    f"{config.slice_view} extent {volume.shape[axis]}"
                )
            plane = np.take(volume, config.slice_index, axis=axis)
            arrays.append(np.repeat(plane[None, :, :], 3, axis=0))  # 3-channel
        else:
            arrays.append(volume[None, :, :, :])  # 1-channel
    return torch.from_numpy(np.stack(arrays))


def _batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator)
    start = 0
    while start < n:
        end = min(start + batch_size, n)
        # batch-norm in training mode cannot digest a single late sample
        # with collapsed spatial dims; fold an orphan into the previous batch
        if n - end == 1:
            end = n
        yield order[start:end]
        start = end


@torch.no_grad()
def _accuracy(model: nn.Module, inputs: torch.Tensor, targets: torch.Tensor) -> float:
    model.eval()
    correct = 0
    for start in range(0, len(inputs), 64):
        logits = model(inputs[start : start + 64])
        correct += int((logits.argmax(dim=1) == targets[start : start + 64]).sum())
    return correct / len(targets)


@torch.no_grad()
def _predict(model: nn.Module, inputs: torch.Tensor) -> list[str]:
    model.eval()
    out = []
    for start in range(0, len(inputs), 64):
        logits = model(inputs[start : start + 64])
        out.extend(LABELS[i] for i in logits.argmax(dim=1).tolist())
    return out


def run_experiment(config: ExperimentConfig) -> dict:
    records = parse_manifest(Path(config.manifest).read_text(encoding="utf-8"))
    assignment = parse_assignment(Path(config.assignment).read_text(encoding="utf-8"))
    check_compatible(records, assignment)
    label_of = {r.scan_id: r.label for r in records}
    subject_of = {r.scan_id: r.subject_id for r in records}

    ids = {part: [] for part in ("train", "val", "test")}
    for scan_id in sorted(assignment):
        ids[assignment[scan_id]].append(scan_id)
    scope = "full"
    if config.transition_only:
        keep = transition_subjects(records)
        ids["test"] = [sid for sid in ids["test"] if subject_of[sid] in keep]
        scope = "transition_only"
        if not ids["test"]:
            raise IncompatibleAssignment(
                "transition-only evaluation leaves no test scans"
            )
    if not ids["train"]:
        raise IncompatibleAssignment("assignment has no training scans")

    torch.manual_seed(config.seed)
    model = build_model(config)
    shuffler = torch.Generator().manual_seed(config.seed + 1)

    tensors = {part: _load_inputs(config, ids[part]) for part in ids if ids[part]}
    mean = tensors["train"].mean()
    std = tensors["train"].std().clamp_min(1e-6)
    tensors = {part: (x - mean) / std for part, x in tensors.items()}
    targets = {
        part: torch.tensor([CLASS_INDEX[label_of[sid]] for sid in ids[part]])
        for part in ids
        if ids[part]
    }

    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.learning_rate, weight_decay=config.weight_decay
    )
    loss_fn = nn.CrossEntropyLoss()
    has_val = "val" in tensors
    best_val = -1.0
    best_state = None
    stale = 0
    epochs_trained = 0
    for _epoch in range(config.max_epochs):
        model.train()
        for batch in _batches(len(ids["train"]), config.batch_size, shuffler):
            optimizer.zero_grad()
            loss = loss_fn(model(tensors["train"][batch]), targets["train"][batch])
            loss.backward()
            optimizer.step()
        epochs_trained += 1
        if has_val:
            val_acc = _accuracy(model, tensors["val"], targets["val"])
            if val_acc > best_val:
                best_val = val_acc
                best_state = copy.deepcopy(model.state_dict())
                stale = 0
            else:
                stale += 1
                if stale > config.patience:
                    break
    if best_state is not None:
        model.load_state_dict(best_state)

    predicted = _predict(model, tensors["test"])
    labels = dict(zip(ids["test"], predicted))
    doc = report_doc([(labels[sid], label_of[sid]) for sid in ids["test"]])
    doc.update(
        {
            "model": config.model,
            "seed": config.seed,
            "scope": scope,
            "epochs_trained": epochs_trained,
            "n_train": len(ids["train"]),
            "n_val": len(ids.get("val", [])),
            "val_accuracy": best_val if has_val else None,
        }
    )
    if config.out:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(dump_doc(doc), encoding="utf-8")
        (out / "predictions.csv").write_text(predictions_csv(labels), encoding="utf-8")
    return doc


def summarize_runs(accuracies) -> dict:
    """Aggregate accuracies into the multi-run summary document layout."""
    accs = [float(a) for a in accuracies]
    if not accs:
        raise ValueError("no runs to summarize")
    mean = statistics.fmean(accs)
    std = statistics.stdev(accs) if len(accs) > 1 else 0.0
    return {
        "accuracies": accs,
        "mean": mean,
        "std": std,
        "n_runs": len(accs),
        "formatted": f"{mean * 100:.1f} ± {std * 100:.1f} %",
    }
