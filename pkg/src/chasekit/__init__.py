"""Chase construction, conservativity witnesses and constant abstraction for regular logic."""
