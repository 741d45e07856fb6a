"""substrace: substitutive-system analytics over NFT-style transfer logs."""

__version__ = "0.1.0"
