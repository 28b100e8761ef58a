"""
Basic tests for lepoly MCP Server tools.
"""

import pytest

from mcp_server.tools.analyze_germ import analyze_germ_tool
from mcp_server.tools.check_hypotheses import check_hypotheses_tool
from mcp_server.tools.milnor_number import milnor_number_tool
from mcp_server.tools.puiseux_expand import puiseux_expand_tool


class TestAnalyzeGerm:
    """Test the full analysis tool."""

    @pytest.mark.asyncio
    async def test_analyze_annulus(self):
        """Test analysis of x·ȳ."""
        result = await analyze_germ_tool("x", "y")

        assert result["status"] == "ok"
        assert result["invariants"]["chi"] == 0
        assert result["invariants"]["b1"] == 1
        assert isinstance(result["polyhedron"]["vertices"], list)

    @pytest.mark.asyncio
    async def test_analyze_hypothesis_failure(self):
        """Test that a non-coprime germ is reported, not raised."""
        result = await analyze_germ_tool("x*y", "y")

        assert result["status"] == "failed"
        assert result["exit_code"] == 2

    @pytest.mark.asyncio
    async def test_analyze_invalid_level(self):
        """Test rejection of a malformed level."""
        result = await analyze_germ_tool("x", "y", t="bad")

        assert result["status"] == "failed"
        assert result["exit_code"] == 1


class TestPuiseuxExpand:
    """Test Puiseux expansion tool."""

    @pytest.mark.asyncio
    async def test_expand_cusp(self):
        """Test the cusp gives one ramified branch."""
        result = await puiseux_expand_tool("x^2-y^3")

        assert result["status"] == "ok"
        assert len(result["branches"]) == 1
        assert result["branches"][0]["ramification"] == 2
        assert result["newton_polygon"][0]["slope"] == "-3/2"

    @pytest.mark.asyncio
    async def test_expand_non_squarefree(self):
        """Test that a double line is rejected."""
        result = await puiseux_expand_tool("x^2")

        assert result["status"] == "failed"
        assert result["exit_code"] == 3


class TestMilnorNumber:
    """Test Milnor number tool."""

    @pytest.mark.asyncio
    async def test_milnor_e6(self):
        """Test μ(x³ + y⁴) = 6."""
        result = await milnor_number_tool("x^3+y^4")

        assert result["status"] == "ok"
        assert result["milnor_number"] == 6

    @pytest.mark.asyncio
    async def test_milnor_smooth(self):
        """Test a smooth germ is reported as a failure."""
        result = await milnor_number_tool("x+y")

        assert result["status"] == "failed"
        assert "smooth" in result["error"]


class TestCheckHypotheses:
    """Test hypothesis check tool."""

    @pytest.mark.asyncio
    async def test_cusp_passes(self):
        """Test a holomorphic cusp passes every check."""
        result = await check_hypotheses_tool("x^2+y^3")

        assert result["status"] == "ok"
        assert result["passed"] is True
        assert result["mode"] == "holomorphic"

    @pytest.mark.asyncio
    async def test_common_factor_fails(self):
        """Test a shared factor is flagged."""
        result = await check_hypotheses_tool("x*y", "y")

        assert result["passed"] is False
        assert result["coprime"] is False

    @pytest.mark.asyncio
    async def test_parse_error(self):
        """Test unreadable input."""
        result = await check_hypotheses_tool("x^^2")

        assert result["status"] == "failed"
        assert result["exit_code"] == 1
