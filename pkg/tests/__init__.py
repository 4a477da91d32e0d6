"""Tests for the ``ideatopic`` package."""
