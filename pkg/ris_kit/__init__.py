"""Statistical-CSI analysis toolkit for RIS-aided massive MIMO uplinks with direct links."""

__version__ = "1.0.0"
