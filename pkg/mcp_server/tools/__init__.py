"""
MCP tools for the lepoly server.
"""
