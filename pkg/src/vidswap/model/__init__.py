from .blendnet import BlendInput, BlendNet, frames_to_tensor, tensor_to_frames
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig
from .quantizer import EmaCodebook, quantize

__all__ = [
    "BlendInput",
    "BlendNet",
    "EmaCodebook",
    "ModelConfig",
    "frames_to_tensor",
    "load_checkpoint",
    "quantize",
    "save_checkpoint",
    "tensor_to_frames",
]
