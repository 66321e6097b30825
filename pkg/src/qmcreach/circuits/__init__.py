"""Bundled circuit and channel files for the benchmark families."""
