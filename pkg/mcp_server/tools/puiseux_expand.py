"""
Puiseux expansions of a plane curve at the origin.
"""

import asyncio
from typing import Any, Dict

from loguru import logger

from lepoly.errors import LepolyError
from lepoly.parser import poly_parse
from lepoly.puiseux import newton_polygon, puiseux_branches


def _expand(poly: str, order: int) -> Dict[str, Any]:
    p = poly_parse(poly)
    polygon = newton_polygon(p)
    branches = puiseux_branches(p, order)
    return {
        "status": "ok",
        "polynomial": str(p),
        "newton_polygon": [
            {
                "start": [e.start[0], str(e.start[1])],
                "end": [e.end[0], str(e.end[1])],
                "slope": str(e.slope),
            }
            for e in polygon.edges
        ],
        "branches": [b.to_dict() for b in branches],
    }


async def puiseux_expand_tool(poly: str, order: int = 20) -> Dict[str, Any]:
    """
    Expand every branch of {poly = 0} through the origin.

    Args:
        poly: squarefree polynomial text vanishing at the origin
        order: w-exponent truncation bound

    Returns:
        Dictionary with the Newton polygon edges and one entry per branch
    """
    try:
        return await asyncio.to_thread(_expand, poly, order)
    except LepolyError as e:
        logger.error(f"Puiseux expansion of {poly!r} failed: {e}")
        return {"status": "failed", "error": str(e), "exit_code": e.exit_code}
