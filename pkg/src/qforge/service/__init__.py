"""HTTP front end: the same runs as the CLI, served by FastAPI."""
