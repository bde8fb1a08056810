# Tests package for the equivariant Khovanov toolkit
