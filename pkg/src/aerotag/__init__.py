"""aerotag: UAV camera-to-ground geotagging, shared POI sync, and GPS
error analysis at desk scale."""

__version__ = "0.1.0"
