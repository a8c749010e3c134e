"""Tests for nh_eur."""
