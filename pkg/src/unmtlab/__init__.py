"""Desk-scale unsupervised machine translation laboratory."""
