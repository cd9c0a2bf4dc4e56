"""Algorithms: generators, tracing, rewrite operations, drift, search and rendering."""
