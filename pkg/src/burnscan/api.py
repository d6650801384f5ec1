"""HTTP facade over a triage session.

Thin by design: validation and status mapping live here, every decision
that matters is in the session. Conflict semantics: relabeling by the
same annotator is an overwrite, a different annotator gets 409 and must
refetch. Labels are also rejected with 409 while a round is retraining.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .looper import (
    IllegalBurnLabel,
    LabelConflict,
    RoundActive,
    TriageSession,
    UnknownAddress,
)

API_PREFIX = "/v1"


class LabelRequest(BaseModel):
    address: str = Field(min_length=1)
    label: Literal["burn", "regular", "vanity-suspect", "unstructured", "other"]
    annotator: str = Field(min_length=1)


class RoundRequest(BaseModel):
    seed: int = 0


def create_app(session: TriageSession) -> FastAPI:
    app = FastAPI(title="burnscan", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.session = session

    @app.exception_handler(UnknownAddress)
    async def _unknown(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc.args[0])})

    @app.exception_handler(LabelConflict)
    async def _conflict(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(RoundActive)
    async def _round_active(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(IllegalBurnLabel)
    async def _illegal(request, exc):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get(f"{API_PREFIX}/queue/next")
    def queue_next():
        item = session.queue.next()
        if item is None:
            return Response(status_code=204)
        return {"item": item.to_dict(), "pending": len(session.queue)}

    @app.get(f"{API_PREFIX}/queue")
    def queue_page(offset: int = 0, limit: int = 20):
        items = session.queue.page(offset=max(offset, 0), limit=max(limit, 0))
        return {
            "total": len(session.queue),
            "offset": max(offset, 0),
            "items": [it.to_dict() for it in items],
        }

    @app.post(f"{API_PREFIX}/labels")
    def post_label(req: LabelRequest):
        record = session.submit_label(
            req.address, req.label, req.annotator, fail_on_conflict=True
        )
        return {"record": record.to_dict(), "pending": len(session.queue)}

    @app.get(f"{API_PREFIX}/address/{{address}}")
    def address_detail(address: str):
        row = session.stats.get(address)
        if row is None:
            raise UnknownAddress(address)
        active = session.store.active(address)
        return {
            "address": address,
            "stats": {
                "first_apparition": row.first_apparition,
                "last_apparition": row.last_apparition,
                "tx_count": row.tx_count,
                "total_received": row.total_received,
                "total_sent": row.total_sent,
            },
            "never_spent": row.total_sent == 0,
            "active_label": active.to_dict() if active else None,
            "history": [r.to_dict() for r in session.store.history(address)],
            "context_txids": list(session.context.get(address, ())),
        }

    @app.get(f"{API_PREFIX}/rounds")
    def rounds():
        return {
            "rounds": [r.to_dict() for r in session.round_reports()],
            "converged": session.converged,
            "pending": len(session.queue),
        }

    @app.post(f"{API_PREFIX}/rounds/run")
    def run_round(req: Optional[RoundRequest] = None):
        report = session.run_round(req.seed if req else 0)
        return {"report": report.to_dict(), "pending": len(session.queue)}

    return app
