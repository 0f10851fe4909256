# Test package for delaylmi
