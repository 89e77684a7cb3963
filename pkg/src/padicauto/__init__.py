"""Exact tools for p-adic automaton functions: synthesis, plots, links, van der Put."""
