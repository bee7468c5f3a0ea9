"""Test suite for Separated Net Lab."""
