"""Secret-shared fixed-point arithmetic and oblivious fingerprint alignment."""
