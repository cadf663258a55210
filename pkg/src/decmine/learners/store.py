"""Model persistence: one zip file holding meta.json plus the learned
parameters as .npy entries. Zip entries carry a fixed timestamp so identical
models serialize to identical bytes."""

from __future__ import annotations

import io
import json
import zipfile
from pathlib import Path

import numpy as np

from .._json import canonical_dumps
from ..errors import InputError
from ..situation import FeatureEncoder
from .base import ConstantEstimator, TrainedDecisionModel
from .boosting import GradientBoostingEstimator
from .forest import RandomForestEstimator
from .nn import NeuralNetEstimator
from .svm import LinearSvmEstimator
from .tree import ClassificationTree

FORMAT_VERSION = 1

_TYPES = {
    "constant": ConstantEstimator,
    "classification_tree": ClassificationTree,
    "random_forest": RandomForestEstimator,
    "gradient_boosting": GradientBoostingEstimator,
    "linear_svm": LinearSvmEstimator,
    "neural_net": NeuralNetEstimator,
}
_NAMES = {cls: name for name, cls in _TYPES.items()}

_ZIP_DATE = (1980, 1, 1, 0, 0, 0)


def _estimator_meta(est) -> dict:
    if isinstance(est, ClassificationTree):
        return est.meta()
    return est.meta()


def _write_entry(zf: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_ZIP_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    zf.writestr(info, data)


def dump_model(model: TrainedDecisionModel) -> bytes:
    arrays = model.estimator.to_arrays()
    meta = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "alternatives": list(model.alternatives),
        "class_order": list(model.class_order),
        "params": {k: v for k, v in model.params.items()},
        "seed": model.seed,
        "degenerate": model.degenerate,
        "estimator_type": _NAMES[type(model.estimator)],
        "estimator_meta": _estimator_meta(model.estimator),
        "encoder": model.encoder.to_dict(),
        "array_names": sorted(arrays),
    }
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        _write_entry(zf, "meta.json", canonical_dumps(meta).encode("utf-8"))
        for name in sorted(arrays):
            arr_buf = io.BytesIO()
            np.save(arr_buf, np.ascontiguousarray(arrays[name]))
            _write_entry(zf, f"arrays/{name}.npy", arr_buf.getvalue())
    return buf.getvalue()


def load_model(data: bytes) -> TrainedDecisionModel:
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            meta = json.loads(zf.read("meta.json").decode("utf-8"))
            arrays = {
                name: np.load(io.BytesIO(zf.read(f"arrays/{name}.npy")))
                for name in meta["array_names"]
            }
    except (zipfile.BadZipFile, KeyError) as exc:
        raise InputError(f"not a valid model file: {exc}") from None
    if meta.get("format_version") != FORMAT_VERSION:
        raise InputError(f"unsupported model format version {meta.get('format_version')}")
    est_cls = _TYPES[meta["estimator_type"]]
    if est_cls is ClassificationTree:
        estimator = ClassificationTree.restore(meta["estimator_meta"], arrays)
    else:
        estimator = est_cls.from_arrays(meta["estimator_meta"], arrays)
    return TrainedDecisionModel(
        kind=meta["kind"],
        encoder=FeatureEncoder.from_dict(meta["encoder"]),
        alternatives=tuple(meta["alternatives"]),
        class_order=tuple(meta["class_order"]),
        estimator=estimator,
        params=meta["params"],
        seed=meta["seed"],
        degenerate=meta["degenerate"],
    )


def save_model(model: TrainedDecisionModel, path: str | Path) -> None:
    Path(path).write_bytes(dump_model(model))


def load_model_file(path: str | Path) -> TrainedDecisionModel:
    return load_model(Path(path).read_bytes())
