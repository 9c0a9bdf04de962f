"""Code-based public-key and homomorphic encryption toolkit."""
