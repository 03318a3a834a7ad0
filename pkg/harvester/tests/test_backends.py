import numpy as np
import pytest

from conftest import paint_scene
from mask_harvester.backends import ColorKeyBackend, GroundedSamBackend, make_segmenter
from mask_harvester.errors import ModelUnavailable


class TestColorKeyBackend:
    def test_segments_painted_scene(self):
        frame = paint_scene(tip_x=30.0, bowl_top_y=110.0)
        detections = ColorKeyBackend().segment(frame)
        labels = {d.label for d in detections}
        assert labels == {"Food", "Spoon", "Face"}
        food = next(d for d in detections if d.label == "Food")
        assert 600 < int(food.mask.sum()) < 1000  # ~pi * 16^2

    def test_min_area_drops_specks(self):
        frame = np.full((40, 40, 3), 28, dtype=np.uint8)
        frame[5, 5] = ColorKeyBackend.DEFAULT_COLORS["Fork"]
        assert ColorKeyBackend().segment(frame) == []
        assert len(ColorKeyBackend(min_area_px=1).segment(frame)) == 1

    def test_deterministic(self):
        frame = paint_scene(tip_x=30.0, bowl_top_y=110.0)
        a = ColorKeyBackend().segment(frame)
        b = ColorKeyBackend().segment(frame)
        assert [(d.label, d.confidence) for d in a] == [(d.label, d.confidence) for d in b]
        assert all((x.mask == y.mask).all() for x, y in zip(a, b))

    def test_manifest_pins_color_table(self):
        manifest = ColorKeyBackend().manifest()
        assert manifest["backend"] == "color-key"
        assert len(manifest["color_table_sha256"]) == 64


class TestGroundedSamBackend:
    def test_unavailable_models_raise_with_diagnostics(self):
        try:
            backend = GroundedSamBackend()
        except ModelUnavailable as exc:
            message = str(exc)
            assert GroundedSamBackend.DETECTOR_ID in message
            assert GroundedSamBackend.SEGMENTER_ID in message
            return
        # weights were actually available: the manifest must pin them
        manifest = backend.manifest()
        assert manifest["detector"] == GroundedSamBackend.DETECTOR_ID
        assert manifest["segmenter"] == GroundedSamBackend.SEGMENTER_ID


def test_make_segmenter():
    assert isinstance(make_segmenter("color"), ColorKeyBackend)
    with pytest.raises(ValueError):
        make_segmenter("nope")
