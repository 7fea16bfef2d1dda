"""
Fitted-model documents.

A fitted model serialises to a self-describing JSON document so forecasting
and impact runs can reuse it without refitting. The document keeps the
training window values; residuals are recomputed on load from the stored
coefficients, everything else is restored verbatim.
"""

import json
import logging
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from core_series import MonthIndex, MonthlySeries
from errors import ModelDocumentError, SarimaToolkitError
from sarima import CoefficientSet, FittedModel, SarimaSpec, assemble_model
from spec_notation import parse_spec, render_spec

logger = logging.getLogger(__name__)

DOCUMENT_FORMAT = "sarima-fitted-model"
DOCUMENT_VERSION = 1


class DiffContextDocument(BaseModel):
    d: int = Field(ge=0)
    D: int = Field(ge=0)
    s: int = Field(ge=1)
    retained_prefixes: List[List[float]]


class ModelDocument(BaseModel):
    """On-disk schema of a fitted model."""
    format: Literal["sarima-fitted-model"] = DOCUMENT_FORMAT
    version: Literal[1] = DOCUMENT_VERSION
    label: str = ""
    spec: str
    coefficients: Dict[str, float]
    standard_errors: Dict[str, Optional[float]]   # null when unavailable
    sigma2: float = Field(gt=0)
    loglik: float
    aic: float
    bic: float
    aicc: float
    n_effective: int = Field(ge=1)
    converged: bool = True
    se_available: bool = True
    initial_loglik: Optional[float] = None
    train_start: str
    train_end: str
    train_values: List[float]
    diff_context: DiffContextDocument


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def to_document(model: FittedModel) -> ModelDocument:
    ctx = model.ctx
    return ModelDocument(
        label=model.label,
        spec=render_spec(model.spec),
        coefficients=model.coef.as_dict(),
        standard_errors={slot: _finite_or_none(se) for slot, se in model.se.items()},
        sigma2=model.sigma2,
        loglik=model.loglik,
        aic=model.aic,
        bic=model.bic,
        aicc=model.aicc,
        n_effective=model.n_effective,
        converged=model.converged,
        se_available=model.se_available,
        initial_loglik=model.initial_loglik,
        train_start=str(model.train_start),
        train_end=str(model.train_end),
        train_values=[float(v) for v in model.train.values],
        diff_context=DiffContextDocument(
            d=ctx.d, D=ctx.D, s=ctx.s,
            retained_prefixes=[list(prefix) for prefix in ctx.retained_prefixes],
        ),
    )


def from_document(doc: ModelDocument) -> FittedModel:
    try:
        spec: SarimaSpec = parse_spec(doc.spec)
        coef = CoefficientSet.from_mapping(spec, doc.coefficients)
        train = MonthlySeries(MonthIndex.parse(doc.train_start), doc.train_values)
    except (SarimaToolkitError, ValueError) as e:
        raise ModelDocumentError(f"inconsistent model document: {e}") from e
    if str(train.end) != doc.train_end:
        raise ModelDocumentError(
            f"train window {doc.train_start}..{doc.train_end} does not match {len(train)} stored values"
        )

    rebuilt = assemble_model(spec, coef, train, sigma2=doc.sigma2, label=doc.label)
    ctx_doc = doc.diff_context
    stored_prefixes = tuple(tuple(prefix) for prefix in ctx_doc.retained_prefixes)
    if (ctx_doc.d, ctx_doc.D, ctx_doc.s) != (spec.d, spec.D, spec.s) or stored_prefixes != rebuilt.ctx.retained_prefixes:
        raise ModelDocumentError("stored differencing context disagrees with the train window")
    if rebuilt.n_effective != doc.n_effective:
        raise ModelDocumentError(
            f"n_effective {doc.n_effective} does not match the train window ({rebuilt.n_effective})"
        )

    se = {slot: (float("nan") if value is None else value) for slot, value in doc.standard_errors.items()}
    return FittedModel(
        spec=spec, coef=coef, se=se, sigma2=doc.sigma2, loglik=doc.loglik,
        aic=doc.aic, bic=doc.bic, aicc=doc.aicc, residuals=rebuilt.residuals,
        ctx=rebuilt.ctx, n_effective=doc.n_effective, train=train,
        diffed=rebuilt.diffed, label=doc.label, converged=doc.converged,
        se_available=doc.se_available, initial_loglik=doc.initial_loglik,
    )


def dumps(model: FittedModel) -> str:
    return to_document(model).model_dump_json(indent=2)


def loads(text: str) -> FittedModel:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelDocumentError(f"model document is not valid JSON: {e}") from e
    if not isinstance(payload, dict) or payload.get("format") != DOCUMENT_FORMAT:
        raise ModelDocumentError(f"not a {DOCUMENT_FORMAT} document")
    if payload.get("version") != DOCUMENT_VERSION:
        raise ModelDocumentError(f"unsupported model document version {payload.get('version')!r}")
    try:
        doc = ModelDocument.model_validate(payload)
    except ValidationError as e:
        raise ModelDocumentError(f"invalid model document: {e.error_count()} field error(s)") from e
    return from_document(doc)


def save_model(model: FittedModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps(model), encoding="utf-8")
    logger.info(f"Saved model {model.label or render_spec(model.spec)} to {path}")
    return path


def load_model(path: Union[str, Path]) -> FittedModel:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ModelDocumentError(f"cannot read model document {path}: {e}") from e
    return loads(text)
