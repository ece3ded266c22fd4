"""Room geometry, ray tracing, receiver construction and link metrics."""
