"""Tests for swarm-infer."""
