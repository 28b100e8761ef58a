"""
Full Lê polyhedron analysis of a germ f·ḡ.
"""

import asyncio
from typing import Any, Dict, Optional, Union

from loguru import logger
from pydantic import ValidationError

from lepoly.config import RunConfig
from lepoly.errors import ConfigError
from lepoly.pipeline import run_pipeline


async def analyze_germ_tool(
    f: str,
    g: str = "1",
    seed: Optional[int] = None,
    t: Union[str, float] = "auto",
    arg_t: float = 0.0,
    trunc: Optional[int] = None,
) -> Dict[str, Any]:
    """
    Run the pipeline in a worker thread and return the report as a dict.

    Args:
        f: polynomial text in x, y
        g: polynomial text in y
        seed: base point jitter seed (environment default when None)
        t: |t| override or "auto"
        arg_t: argument of t in radians
        trunc: Puiseux truncation order (environment default when None)

    Returns:
        Report dictionary; failures carry status "failed" and an exit code
    """
    overrides = {k: v for k, v in {"seed": seed, "trunc": trunc}.items() if v is not None}
    try:
        config = RunConfig(f=f, g=g, t=t, arg_t=arg_t, **overrides)
    except ValidationError as e:
        logger.error(f"Invalid analysis request: {e}")
        return {"status": "failed", "error": str(e), "exit_code": ConfigError.exit_code}

    report = await asyncio.to_thread(run_pipeline, config)
    return report.model_dump(mode="json")
