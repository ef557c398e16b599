"""Model builders: a pretrained 2D ResNet-18 and a 3D ResNet-22.

The 3D network is 22 weight layers deep counting the stem and the three
convolutions in each of its seven pre-activation bottleneck blocks. Every
block halves the spatial size through its middle 3×3×3 convolution; the 1×1×1
convolutions on either side keep stride 1, and the inner width is half the
block's output width. The stem maps the 1-channel volume to 32 channels at
stride 1.
"""

import warnings

import torch
from torch import nn

from .config import MODEL_2D, MODEL_3D, ExperimentConfig
from .errors import UnknownModel

#: output channels of the seven bottleneck blocks, in order
BLOCK_CHANNELS = (32, 64, 64, 128, 128, 256, 256)

#: stem + 3 convolutions per block
N_WEIGHT_LAYERS = 1 + 3 * len(BLOCK_CHANNELS)


class PreActBottleneck3d(nn.Module):
    """BN→ReLU→1×1, BN→ReLU→3×3 (stride 2), BN→ReLU→1×1, plus projection."""

    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        mid = out_channels // 2
        self.bn1 = nn.BatchNorm3d(in_channels)
        self.conv1 = nn.Conv3d(in_channels, mid, kernel_size=1, stride=1, bias=False)
        self.bn2 = nn.BatchNorm3d(mid)
        self.conv2 = nn.Conv3d(mid, mid, kernel_size=3, stride=2, padding=1, bias=False)
        self.bn3 = nn.BatchNorm3d(mid)
        self.conv3 = nn.Conv3d(mid, out_channels, kernel_size=1, stride=1, bias=False)
        self.shortcut = nn.Conv3d(in_channels, out_channels, kernel_size=1, stride=2, bias=False)

    def forward(self, x):
        preact = torch.relu(self.bn1(x))
        out = self.conv1(preact)
        out = self.conv2(torch.relu(self.bn2(out)))
        out = self.conv3(torch.relu(self.bn3(out)))
        return out + self.shortcut(preact)


class ResNet22_3d(nn.Module):
    def __init__(self, n_classes: int = 3):
        super().__init__()
        self.stem = nn.Conv3d(1, BLOCK_CHANNELS[0], kernel_size=3, stride=1, padding=1, bias=False)
        blocks = []
        in_channels = BLOCK_CHANNELS[0]
        for out_channels in BLOCK_CHANNELS:
            blocks.append(PreActBottleneck3d(in_channels, out_channels))
            in_channels = out_channels
        self.blocks = nn.Sequential(*blocks)
        self.bn = nn.BatchNorm3d(in_channels)
        self.fc = nn.Linear(in_channels, n_classes)

    def forward(self, x):
        out = self.blocks(self.stem(x))
        out = torch.relu(self.bn(out))
        out = nn.functional.adaptive_avg_pool3d(out, 1).flatten(1)
        return self.fc(out)


def _build_2d(n_classes: int) -> nn.Module:
    from torchvision.models import ResNet18_Weights, resnet18

    try:
        model = resnet18(weights=ResNet18_Weights.DEFAULT)
    except Exception as exc:  # no network, missing cache, checksum trouble
        warnings.warn(
            f"could not load pretrained weights ({exc}); "
            "falling back to random initialization",
            stacklevel=3,
        )
        model = resnet18(weights=None)
    model.fc = nn.Linear(model.fc.in_features, n_classes)
    return model


def build_model(config: ExperimentConfig) -> nn.Module:
    if config.model == MODEL_3D:
        return ResNet22_3d()
    if config.model == MODEL_2D:
        return _build_2d(n_classes=3)
    raise UnknownModel(config.model)
