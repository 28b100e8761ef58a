"""
Hypothesis checks for a germ f·ḡ.
"""

from typing import Any, Dict

from loguru import logger

from lepoly.errors import LepolyError
from lepoly.germ import check_hypotheses, normalize_coordinates
from lepoly.parser import poly_parse


async def check_hypotheses_tool(f: str, g: str = "1") -> Dict[str, Any]:
    """
    Run every hypothesis check the construction relies on.

    Args:
        f: polynomial text in x, y
        g: polynomial text, normally in y only

    Returns:
        HypothesisReport dictionary with a `passed` flag, or a failure payload
    """
    try:
        p, q, swapped = normalize_coordinates(poly_parse(f), poly_parse(g))
    except LepolyError as e:
        logger.error(f"Could not read germ f={f!r}, g={g!r}: {e}")
        return {"status": "failed", "error": str(e), "exit_code": e.exit_code}
    report = check_hypotheses(p, q, swapped)
    return {"status": "ok", "passed": report.passed, **report.model_dump()}
