"""Thin spanning trees for near-minimum cuts of k-edge-connected multigraphs."""
