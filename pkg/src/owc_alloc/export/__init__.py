"""Result files: CSV/JSON tables and SVG charts."""
