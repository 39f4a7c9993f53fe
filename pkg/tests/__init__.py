"""Tests for Unpredictability Lab."""
