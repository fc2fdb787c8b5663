"""Secure fingerprint recognition pipelines."""
