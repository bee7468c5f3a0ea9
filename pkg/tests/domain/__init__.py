"""Tests for domain layer modules."""
