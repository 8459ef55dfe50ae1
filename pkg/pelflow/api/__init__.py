# CLI commands package
