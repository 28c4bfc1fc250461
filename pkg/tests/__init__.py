"""Test suite for copyless-check."""
