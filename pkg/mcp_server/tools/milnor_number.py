"""
Milnor number of a holomorphic plane curve germ.
"""

from typing import Any, Dict

from loguru import logger

from lepoly.errors import LepolyError
from lepoly.oracle import milnor_number_resultant
from lepoly.parser import poly_parse


async def milnor_number_tool(f: str) -> Dict[str, Any]:
    """
    Compute μ(f) at the origin from resultants in generic coordinates.

    Args:
        f: polynomial text with an isolated singularity at 0

    Returns:
        Dictionary with the Milnor number, or a failure payload
    """
    try:
        p = poly_parse(f)
        mu = milnor_number_resultant(p)
    except LepolyError as e:
        logger.error(f"Milnor number of {f!r} failed: {e}")
        return {"status": "failed", "error": str(e), "exit_code": e.exit_code}
    return {"status": "ok", "f": str(p), "milnor_number": mu}
