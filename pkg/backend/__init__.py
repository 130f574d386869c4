"""Backend package for evidassoc - fuzzy similarity, evidence combination, assignment and tracking"""
