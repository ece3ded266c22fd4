"""Test suite for Self-Healing Documentation Engine."""
