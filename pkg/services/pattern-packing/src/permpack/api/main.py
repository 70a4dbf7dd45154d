# services/pattern-packing/src/permpack/api/main.py
import logging
from typing import Any, Dict, List, Literal

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .. import __version__
from ..config import OptimizerConfig
from ..core.combination import parse_combination
from ..core.layered import block_sequence, enumerate_quasi_blocks, parse_block_sequence
from ..core.permutation import count_occurrences, density, parse_permutation
from ..errors import CapExceededError, HypothesisError, ParseError, PermPackError
from ..logging_config import configure_logging
from ..models.bounds import (
    BoundMode,
    BoundResult,
    BoundSequenceReport,
    bound_sequence,
    closed_form_packing,
    extended_price_bound,
    min_extended_price_bound,
    min_mono_value,
    min_price_bound,
    price_bound,
)
from ..models.oracle import (
    ErdosSzekeresReport,
    ExtremalReport,
    SandwichReport,
    brute_force_pN,
    brute_force_pN_layered,
    erdos_szekeres_scan,
    sandwich_report,
)
from ..utils.serialization import DensityModel

configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(title="Pattern Packing Service", version=__version__)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_methods=["*"],
    allow_headers=["*"],
)


class OptimizerOptions(BaseModel):
    starts: int = Field(default=64, gt=0)
    max_iters: int = Field(default=10000, gt=0)
    seed: int = Field(default=0, ge=0)

    def to_config(self) -> OptimizerConfig:
        # the service never forks worker pools
        return OptimizerConfig(starts=self.starts, max_iters=self.max_iters, seed=self.seed, workers=1)


class DensityRequest(BaseModel):
    tau: str
    sigma: str


class DensityResponse(BaseModel):
    tau: str
    sigma: str
    count: int
    p: str
    density: DensityModel


class BoundRequest(BaseModel):
    combination: str
    mode: BoundMode = BoundMode.PACK
    n: int = Field(gt=0)
    W: List[int] = Field(default_factory=list)
    force: bool = False
    optimizer: OptimizerOptions = Field(default_factory=OptimizerOptions)


class BoundSequenceRequest(BaseModel):
    combination: str
    mode: BoundMode = BoundMode.PACK
    n_max: int = Field(gt=0)
    w_policy: Literal["all", "none", "all-but-first"] = "all-but-first"
    force: bool = False
    optimizer: OptimizerOptions = Field(default_factory=OptimizerOptions)


class ClosedFormRequest(BaseModel):
    blocks: str


class MinMonoRequest(BaseModel):
    ell: int
    k: int


class ExtremalRequest(BaseModel):
    combination: str
    N: int = Field(gt=0)
    mode: Literal["max", "min"] = "max"
    layered: bool = False


class QuasiBlocksRequest(BaseModel):
    sigma: str


class SandwichRequest(BaseModel):
    combination: str
    n: int = Field(gt=0)
    N: int = Field(gt=0)
    extended: bool = False
    optimizer: OptimizerOptions = Field(default_factory=OptimizerOptions)


class ErdosSzekeresRequest(BaseModel):
    N: int = Field(gt=0)
    k: int = Field(gt=0)


def _http_error(e: Exception, action: str) -> HTTPException:
    logger.error(f"{action} failed: {str(e)}")
    if isinstance(e, (ParseError, ValueError, IndexError)):
        return HTTPException(status_code=400, detail=str(e))
    if isinstance(e, (HypothesisError, CapExceededError)):
        return HTTPException(status_code=422, detail=str(e))
    return HTTPException(status_code=500, detail=str(e))


@app.get("/health")
async def health_check():
    return {"status": "healthy", "service": "pattern-packing", "version": __version__}


@app.post("/density", response_model=DensityResponse)
async def compute_density(request: DensityRequest):
    """Occurrence count and exact density of tau in sigma"""
    try:
        tau = parse_permutation(request.tau)
        sigma = parse_permutation(request.sigma)
        value = density(tau, sigma)
        return DensityResponse(
            tau=str(tau),
            sigma=str(sigma),
            count=count_occurrences(tau, sigma),
            p=str(value.exact),
            density=DensityModel.from_fraction(value.exact),
        )
    except (PermPackError, ValueError) as e:
        raise _http_error(e, "Density")


@app.post("/bound", response_model=BoundResult)
def compute_bound(request: BoundRequest):
    """Price / Extended Price / Minimization bound of one order"""
    try:
        f = parse_combination(request.combination)
        cfg = request.optimizer.to_config()
        if request.mode == BoundMode.PACK:
            return price_bound(f, request.n, cfg, request.force)
        if request.mode == BoundMode.PACK_EXTENDED:
            return extended_price_bound(f, request.n, request.W, cfg, request.force)
        if request.mode == BoundMode.MINIMIZE:
            return min_price_bound(f, request.n, cfg, request.force)
        return min_extended_price_bound(f, request.n, request.W, cfg, request.force)
    except (PermPackError, ValueError, IndexError) as e:
        raise _http_error(e, "Bound")


@app.post("/bound-seq", response_model=BoundSequenceReport)
def compute_bound_sequence(request: BoundSequenceRequest):
    try:
        f = parse_combination(request.combination)
        return bound_sequence(
            f,
            request.n_max,
            request.mode,
            request.optimizer.to_config(),
            request.w_policy,
            request.force,
        )
    except (PermPackError, ValueError) as e:
        raise _http_error(e, "Bound sequence")


@app.post("/closed-form")
async def compute_closed_form(request: ClosedFormRequest):
    try:
        blocks = parse_block_sequence(request.blocks)
        value = closed_form_packing(blocks)
        return {"blocks": str(blocks), "value": str(value), "float": float(value)}
    except PermPackError as e:
        raise _http_error(e, "Closed form")


@app.post("/minmono")
async def compute_min_mono(request: MinMonoRequest):
    try:
        value = min_mono_value(request.ell, request.k)
        return {"ell": request.ell, "k": request.k, "value": str(value), "float": float(value)}
    except PermPackError as e:
        raise _http_error(e, "Min mono")


@app.post("/extremal", response_model=ExtremalReport)
def compute_extremal(request: ExtremalRequest):
    """Exhaustive extremal density over S_N or over layered permutations"""
    try:
        f = parse_combination(request.combination)
        if request.layered:
            return brute_force_pN_layered(f, request.N, request.mode)
        return brute_force_pN(f, request.N, request.mode, workers=1)
    except (PermPackError, ValueError) as e:
        raise _http_error(e, "Extremal search")


@app.post("/qblocks")
async def list_quasi_blocks(request: QuasiBlocksRequest) -> Dict[str, Any]:
    try:
        sigma = parse_permutation(request.sigma)
        decompositions = enumerate_quasi_blocks(sigma)
        return {
            "sigma": str(sigma),
            "blocks": block_sequence(sigma).to_json(),
            "count": len(decompositions),
            "decompositions": [str(d) for d in decompositions],
        }
    except PermPackError as e:
        raise _http_error(e, "Quasi-block enumeration")


@app.post("/sandwich", response_model=SandwichReport)
def compute_sandwich(request: SandwichRequest):
    try:
        f = parse_combination(request.combination)
        return sandwich_report(
            f, request.n, request.N, request.optimizer.to_config(), extended=request.extended
        )
    except (PermPackError, ValueError) as e:
        raise _http_error(e, "Sandwich")


@app.post("/erdos-szekeres", response_model=ErdosSzekeresReport)
def scan_erdos_szekeres(request: ErdosSzekeresRequest):
    try:
        return erdos_szekeres_scan(request.N, request.k)
    except (PermPackError, ValueError) as e:
        raise _http_error(e, "Erdos-Szekeres scan")


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=8004)
