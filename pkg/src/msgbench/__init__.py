"""Landscape-characterisation benchmark for nature-inspired optimizers."""
