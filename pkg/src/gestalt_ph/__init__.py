"""Gestalt perceptual grouping from Vietoris-Rips persistent homology."""
