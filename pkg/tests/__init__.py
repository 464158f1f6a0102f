"""Tests package for planar_beltrami."""
