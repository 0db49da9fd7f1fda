"""Problem domains: robot grid planning and string transformations."""
