"""HTTP API backing the web UI.

All endpoints are stateless JSON-in/JSON-out wrapped in an envelope
{ok, result, error}; randomness is seeded per request and the seed is echoed
back so identical requests return identical bodies.
"""
from __future__ import annotations

import math
import os
import secrets
import sys
from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .conjugate import QuantileAssessment, beta_from_quantiles
from .discrete import BayesTable, credible_set, update_table, weights_to_prior
from .distributions import Beta, RngStream, log_density, quantile
from .exceptions import PosteriorLabError
from .mcmc import discrete_metropolis, walk_step

STEP_BUDGET = 1_000_000


class ApiError(Exception):
    def __init__(self, code: str, message: str, status: int = 400):
        super().__init__(message)
        self.code = code
        self.message = message
        self.status = status


def _ok(result) -> dict:
    return {"ok": True, "result": result, "error": None}


def _err(code: str, message: str, status: int) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"ok": False, "result": None,
                 "error": {"code": code, "message": message}})


class LikelihoodSpec(BaseModel):
    kind: Literal["binomial", "poisson"]
    data: dict


class DiscreteUpdateRequest(BaseModel):
    values: list[float]
    weights: list[float]
    likelihood: LikelihoodSpec


class DiscreteCredibleRequest(BaseModel):
    table: dict
    level: float = Field(gt=0.0, lt=1.0)


class BetaFromQuantilesRequest(BaseModel):
    p1: float
    q1: float
    p2: float
    q2: float


class WalkStepRequest(BaseModel):
    weights: list[float]
    current: int
    mode: Literal["seeded", "deterministic"] = "seeded"
    seed: Optional[int] = None
    coin: Optional[Literal["heads", "tails"]] = None
    u: Optional[float] = None


class WalkRunRequest(BaseModel):
    weights: list[float]
    start: int
    steps: int = Field(ge=1)
    seed: Optional[int] = None


def _binomial_loglik(data: dict):
    try:
        y, n = int(data["y"]), int(data["n"])
    except (KeyError, TypeError, ValueError):
        raise ApiError("bad_request", "binomial likelihood needs data {y, n}")
    if not (0 <= y <= n):
        raise ApiError("bad_request", f"need 0 <= y <= n, got y={y}, n={n}")

    def loglik(p: float) -> float:
        if not (0.0 <= p <= 1.0):
            return -math.inf
        if (p == 0.0 and y > 0) or (p == 1.0 and y < n):
            return -math.inf
        out = 0.0
        if y > 0:
            out += y * math.log(p)
        if n - y > 0:
            out += (n - y) * math.log1p(-p)
        return out

    return loglik


def _poisson_loglik(data: dict):
    try:
        n, sum_y = int(data["n"]), float(data["sum_y"])
    except (KeyError, TypeError, ValueError):
        raise ApiError("bad_request", "poisson likelihood needs data {n, sum_y}")
    if n < 1 or sum_y < 0:
        raise ApiError("bad_request", "need n >= 1 and sum_y >= 0")

    def loglik(lam: float) -> float:
        if lam <= 0:
            return -math.inf if sum_y > 0 else -n * lam
        return -n * lam + sum_y * math.log(lam)

    return loglik


def create_app() -> FastAPI:
    app = FastAPI(title="posteriorlab", version=__version__)

    @app.exception_handler(ApiError)
    async def _handle_api_error(_, exc: ApiError):
        return _err(exc.code, exc.message, exc.status)

    @app.exception_handler(RequestValidationError)
    async def _handle_validation(_, exc):
        return _err("bad_request", str(exc), 400)

    @app.get("/api/v1/health")
    def health():
        return _ok({"version": __version__})

    @app.post("/api/v1/discrete/update")
    def discrete_update(req: DiscreteUpdateRequest):
        if len(req.values) != len(req.weights):
            raise ApiError("bad_request", "values and weights lengths differ")
        try:
            prior = weights_to_prior(req.weights)
            loglik = (_binomial_loglik(req.likelihood.data)
                      if req.likelihood.kind == "binomial"
                      else _poisson_loglik(req.likelihood.data))
            table = update_table(req.values, prior, loglik)
        except (ValueError, PosteriorLabError) as e:
            raise ApiError("bad_request", str(e))
        return _ok({"table": table.to_json()})

    @app.post("/api/v1/discrete/credible")
    def discrete_credible(req: DiscreteCredibleRequest):
        try:
            table = BayesTable.from_json(req.table)
            values, coverage = credible_set(table, req.level)
        except (KeyError, ValueError, PosteriorLabError) as e:
            raise ApiError("bad_request", str(e))
        return _ok({"values": values, "coverage": coverage})

    @app.post("/api/v1/beta/from-quantiles")
    def beta_quantiles(req: BetaFromQuantilesRequest):
        try:
            qa = QuantileAssessment(req.p1, req.q1, req.p2, req.q2)
            a, b = beta_from_quantiles(qa)
        except (ValueError, PosteriorLabError) as e:
            raise ApiError("bad_request", str(e))
        d = Beta(a, b)
        grid = np.linspace(0.001, 0.999, 200)
        density = [math.exp(log_density(d, x)) for x in grid]
        return _ok({
            "a": a, "b": b,
            "intervals": {
                "central50": [quantile(d, 0.25), quantile(d, 0.75)],
                "central90": [quantile(d, 0.05), quantile(d, 0.95)],
            },
            "density": {"grid": grid.tolist(), "pdf": density},
        })

    @app.post("/api/v1/walk/step")
    def walk_step_endpoint(req: WalkStepRequest):
        if req.mode == "deterministic":
            if req.coin is None or req.u is None:
                raise ApiError("bad_request",
                               "deterministic mode requires coin and u")
            coin, u, seed = req.coin, req.u, req.seed
        else:
            seed = req.seed if req.seed is not None else secrets.randbelow(2**31)
            g = RngStream(seed).generator
            coin = "heads" if g.random() < 0.5 else "tails"
            u = float(g.random())
        try:
            out = walk_step(req.weights, req.current, coin, u)
        except ValueError as e:
            raise ApiError("bad_request", str(e))
        out["seed"] = seed
        out["coin"] = coin
        out["u"] = u
        return _ok(out)

    @app.post("/api/v1/walk/run")
    def walk_run(req: WalkRunRequest):
        if req.steps > STEP_BUDGET:
            raise ApiError("budget_exceeded",
                           f"steps {req.steps} exceeds budget {STEP_BUDGET}")
        seed = req.seed if req.seed is not None else secrets.randbelow(2**31)
        try:
            path = discrete_metropolis(req.weights, req.start, req.steps,
                                       RngStream(seed))
        except ValueError as e:
            raise ApiError("bad_request", str(e))
        freqs = np.bincount(path, minlength=len(req.weights) + 1)[1:]
        return _ok({
            "path": path.tolist(),
            "frequencies": (freqs / path.size).tolist(),
            "seed": seed,
        })

    return app


app = create_app()


def run_server(port: Optional[int] = None, bind: Optional[str] = None) -> int:
    import uvicorn

    port = port if port is not None else int(os.environ.get("POSTERIORLAB_PORT", "8000"))
    bind = bind if bind is not None else os.environ.get("POSTERIORLAB_BIND", "127.0.0.1")
    try:
        uvicorn.run(app, host=bind, port=port, log_level="info")
    except (OSError, SystemExit) as e:
        print(f"error: could not bind {bind}:{port} ({e})", file=sys.stderr)
        return 3
    return 0
