"""CLI components for Separated Net Lab."""
