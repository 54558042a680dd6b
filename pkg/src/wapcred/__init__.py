"""Identity tokens over legacy phone wire formats.

Issues Ed25519-signed credentials, packs them through base45 into QR
symbols, renders those as WBMP images inside WML decks for WAP
microbrowsers, and verifies them offline or through single-use online
redemption.
"""

__version__ = "0.1.0"
