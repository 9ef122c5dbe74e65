"""vidswap: video-to-video face swapping with a quantized temporal autoencoder."""

__version__ = "0.1.0"
