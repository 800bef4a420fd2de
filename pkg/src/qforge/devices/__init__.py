"""Shipped device coupling graphs (``<name>.graph`` files)."""
