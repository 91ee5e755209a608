# leafmap: leaves of convex foliated projective structures for genus-2 Hitchin representations
# Numerical toolkit: representations, Frenet flags, leaf normalization, spectra and boundary exponents
