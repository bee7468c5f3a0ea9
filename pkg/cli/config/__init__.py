"""CLI configuration module."""
