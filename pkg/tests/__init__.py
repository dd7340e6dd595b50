"""Tests for the hydrodynamics engine."""
