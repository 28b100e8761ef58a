"""
Main entry point for the lepoly MCP Server.
"""

import os
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv
from fastmcp import FastMCP
from loguru import logger

from .tools.analyze_germ import analyze_germ_tool
from .tools.check_hypotheses import check_hypotheses_tool
from .tools.milnor_number import milnor_number_tool
from .tools.puiseux_expand import puiseux_expand_tool

# Load environment variables
load_dotenv()

# Initialize MCP server
mcp = FastMCP("lepoly MCP Server")


@mcp.tool()
async def analyze_germ(
    f: str,
    g: str = "1",
    seed: Optional[int] = None,
    t: Union[str, float] = "auto",
    arg_t: float = 0.0,
    trunc: Optional[int] = None,
) -> Dict[str, Any]:
    """
    Compute the Lê polyhedron of the germ f·ḡ and its invariants.

    Args:
        f: Polynomial in x, y, e.g. "x^2+y^3"
        g: Polynomial in y only; "1" for a holomorphic germ
        seed: Base point jitter seed
        t: Level magnitude or "auto"
        arg_t: Argument of the level in radians
        trunc: Puiseux truncation order

    Returns:
        Full report dictionary (status, n, k, invariants, polyhedron, ...)
    """
    logger.info(f"Analyzing germ f={f}, g={g}")
    result = await analyze_germ_tool(f, g, seed, t, arg_t, trunc)
    if result.get("status") == "ok":
        logger.info(f"Analysis finished: {result['invariants']}")
    else:
        logger.warning(f"Analysis failed: {result.get('error')}")
    return result


@mcp.tool()
async def puiseux_expand(poly: str, order: int = 20) -> Dict[str, Any]:
    """
    Puiseux expansions of the branches of a plane curve at the origin.

    Args:
        poly: Squarefree polynomial vanishing at the origin
        order: Truncation bound on the w-exponents

    Returns:
        Dictionary containing the Newton polygon and the branch list
    """
    logger.info(f"Expanding {poly} to order {order}")
    return await puiseux_expand_tool(poly, order)


@mcp.tool()
async def milnor_number(f: str) -> Dict[str, Any]:
    """
    Milnor number of an isolated plane curve singularity at the origin.

    Args:
        f: Polynomial in x, y

    Returns:
        Dictionary containing milnor_number
    """
    logger.info(f"Computing Milnor number of {f}")
    return await milnor_number_tool(f)


@mcp.tool()
async def check_hypotheses(f: str, g: str = "1") -> Dict[str, Any]:
    """
    Check the hypotheses the Lê polyhedron construction needs.

    Args:
        f: Polynomial in x, y
        g: Polynomial in y

    Returns:
        Hypothesis report dictionary with per-check flags and messages
    """
    logger.info(f"Checking hypotheses for f={f}, g={g}")
    return await check_hypotheses_tool(f, g)


def main():
    """Main entry point for the MCP server."""
    host = os.getenv("MCP_SERVER_HOST", "localhost")
    port = int(os.getenv("MCP_SERVER_PORT", "8000"))

    # Create logs directory if it doesn't exist
    os.makedirs("logs", exist_ok=True)
    logger.add("logs/lepoly.log", rotation="1 day", level=os.getenv("LOG_LEVEL", "INFO"))

    logger.info(f"Starting lepoly MCP Server on {host}:{port}")
    mcp.run(host=host, port=port)


if __name__ == "__main__":
    main()
