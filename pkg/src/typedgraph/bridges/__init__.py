"""Importers from relational tables and XML documents."""
