"""Utilities package for evidassoc - configuration and logging setup"""
