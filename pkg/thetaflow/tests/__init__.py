# tests: unit, property and reproduction tests
