"""Skill-demand analysis of job postings: ingest, deduplicate, match occupations, model topics."""

__version__ = "0.1.0"
