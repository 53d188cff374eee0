# Manifold Bridge aligner
