"""This package contains the configuration models and the YAML parser of omnisr."""
