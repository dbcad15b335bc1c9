"""Bundled verification scenarios (JSON package data)."""
