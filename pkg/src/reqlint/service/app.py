"""FastAPI application. Each endpoint is a thin wrapper over the core package."""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, analytics
from ..catalog import parse_catalog
from ..checkers import Resources
from ..cli import stats_dict
from ..docmodel import DocConfig, parse_document
from ..engine import lint, merge_reports
from ..errors import (BadParams, CatalogMismatch, DegenerateError, FormatError, LengthMismatch,
                      PatternError, ReqlintError, ResourceError, UnknownChecker, ValidationError)
from ..nlp import load_resources
from .schemas import (AgreementRequest, AgreementResponse, CatalogRequest, ErrorResponse,
                      LintRequest, LintResponse, StatsResponse, ValidateResponse)

_STATUS = {
    FormatError: 400,
    PatternError: 400,
    ValidationError: 422,
    UnknownChecker: 422,
    BadParams: 422,
    ResourceError: 422,
    LengthMismatch: 422,
    DegenerateError: 422,
    CatalogMismatch: 409,
}


def _catalog(payload: dict):
    return parse_catalog(json.dumps(payload), "<request>")


def create_app() -> FastAPI:
    app = FastAPI(title="reqlint", version=__version__,
                  description="Rule-based checking of requirements documents.")

    @app.exception_handler(ReqlintError)
    async def _domain_error(request: Request, exc: ReqlintError):
        status = next((code for cls, code in _STATUS.items() if isinstance(exc, cls)), 400)
        body = ErrorResponse(error=type(exc).__name__, detail=str(exc))
        return JSONResponse(status_code=status, content=body.model_dump())

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/lint", response_model=LintResponse, responses={422: {"model": ErrorResponse}})
    def lint_documents(req: LintRequest):
        catalog = _catalog(req.catalog)
        resources = Resources(document_list=dict(req.document_list),
                              gazetteer=dict(load_resources().gazetteer),
                              domain_terms=frozenset(t.lower() for t in req.domain_terms))
        overrides = req.config.model_dump(exclude_none=True) if req.config else {}
        config = DocConfig(**overrides)
        config.validate()
        reports = [lint(parse_document(d.text, config, name=d.name), catalog, resources,
                        config=config, nlp_resources=load_resources())
                   for d in req.documents]
        return merge_reports(reports).filtered(req.min_accuracy).to_dict()

    @app.post("/stats", response_model=StatsResponse)
    def stats(req: CatalogRequest):
        return stats_dict(_catalog(req.catalog))

    @app.post("/agreement", response_model=AgreementResponse)
    def agreement(req: AgreementRequest):
        a, b = analytics.aligned_labels(req.labels_a, req.labels_b)
        return analytics.weighted_kappa(a, b, req.scheme).to_dict()

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: CatalogRequest):
        try:
            catalog = _catalog(req.catalog)
        except ValidationError as exc:
            return ValidateResponse(valid=False, rules=0, violations=exc.violations)
        return ValidateResponse(valid=True, rules=len(catalog), violations=[])

    return app


app = create_app()
