"""
lepoly MCP Server

A Model Context Protocol server exposing Lê polyhedron computations, Puiseux
expansions and Milnor numbers of plane curve germs to AI agents.
"""

__version__ = "0.1.0"
__author__ = "lepoly developers"
