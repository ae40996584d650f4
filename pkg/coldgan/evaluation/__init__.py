"""Cold-start inference and the top-k evaluation harness."""
