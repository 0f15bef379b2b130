"""lastmult test suite."""
