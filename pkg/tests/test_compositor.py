import numpy as np
import pytest
from PIL import Image

from conftest import square_image
from src.compositor.blender import composite
from src.compositor.text_renderer import GlyphPatch, StyleConfig, render_text
from src.layout.contour import ContourMask, RasterImage
from src.layout.placement import PlacementBox, QuadrantTag, quadrants, plan_placement, text_extent
from src.utils.errors import FontError, InputError, MissingGlyphError
from src.visualizer.mask_visualizer import MaskVisualizer


def flat_image(width, height, rgb, alpha=255):
    pixels = np.zeros((height, width, 4), dtype=np.uint8)
    pixels[..., :3] = rgb
    pixels[..., 3] = alpha
    return RasterImage(pixels)


def box_at(origin, size, glyph_height=8, angle=0.0, outline_width=0):
    return PlacementBox(
        anchor=(0, 0),
        angle=angle,
        glyph_height=glyph_height,
        quadrant=QuadrantTag.TL,
        origin=origin,
        box_width=size[0],
        box_height=size[1],
        outline_width=outline_width,
    )


def solid_patch(size, rgb, coverage=1.0):
    width, height = size
    return GlyphPatch(
        coverage=np.full((height, width), coverage),
        color=np.broadcast_to(np.array(rgb, dtype=np.float64), (height, width, 3)).copy(),
        baseline_origin=(width // 2, height // 2),
    )


@pytest.fixture
def style_factory(tmp_path):
    def make(opacity=1.0, fill=(200, 200, 200, 255)):
        return StyleConfig(font_path=tmp_path / "unused.ttf", fill_color=fill, opacity=opacity)
    return make


class TestComposite:
    def test_zero_opacity_is_identity(self, style_factory):
        image = flat_image(20, 20, (100, 100, 100))
        result = composite(image, solid_patch((5, 5), (200, 200, 200)), box_at((2, 2), (5, 5)), style_factory(0.0))
        assert result == image

    def test_full_opacity_replaces_pixel(self, style_factory):
        image = flat_image(20, 20, (100, 100, 100))
        result = composite(image, solid_patch((5, 5), (200, 10, 30)), box_at((2, 2), (5, 5)), style_factory())
        assert result.pixels[4, 4].tolist() == [200, 10, 30, 255]

    def test_half_opacity_averages(self, style_factory):
        image = flat_image(20, 20, (100, 100, 100))
        result = composite(image, solid_patch((5, 5), (200, 200, 200)), box_at((2, 2), (5, 5)), style_factory(0.5))
        assert result.pixels[3, 3].tolist() == [150, 150, 150, 255]

    def test_rounding_of_half_blend(self, style_factory):
        image = flat_image(4, 4, (101, 0, 255))
        result = composite(image, solid_patch((4, 4), (200, 0, 0)), box_at((0, 0), (4, 4)), style_factory(0.5))
        assert result.pixels[0, 0, :3].tolist() == [151, 0, 128]

    def test_pixels_outside_patch_untouched(self, style_factory):
        rng = np.random.default_rng(8)
        pixels = rng.integers(0, 256, size=(30, 40, 4), dtype=np.uint8)
        pixels[..., 3] = 255
        image = RasterImage(pixels)
        coverage = rng.random((6, 9))
        patch = GlyphPatch(coverage=coverage, color=np.full((6, 9, 3), 250.0), baseline_origin=(4, 3))
        result = composite(image, patch, box_at((12, 7), (9, 6)), style_factory(0.7))

        outside = np.ones((30, 40), dtype=bool)
        outside[7:13, 12:21] = False
        np.testing.assert_array_equal(result.pixels[outside], image.pixels[outside])

    def test_zero_coverage_pixels_untouched(self, style_factory):
        image = flat_image(10, 10, (33, 66, 99), alpha=128)
        result = composite(image, solid_patch((4, 4), (255, 255, 255), coverage=0.0), box_at((1, 1), (4, 4)),
                           style_factory())
        assert result == image

    def test_input_not_modified(self, style_factory):
        image = flat_image(10, 10, (0, 0, 0))
        before = np.array(image.pixels)
        composite(image, solid_patch((3, 3), (255, 255, 255)), box_at((0, 0), (3, 3)), style_factory())
        np.testing.assert_array_equal(image.pixels, before)

    def test_box_outside_image(self, style_factory):
        image = flat_image(10, 10, (0, 0, 0))
        with pytest.raises(ValueError):
            composite(image, solid_patch((5, 5), (255, 255, 255)), box_at((8, 8), (5, 5)), style_factory())


class TestStyleConfig:
    def test_rejects_bad_channel(self, tmp_path):
        with pytest.raises(ValueError):
            StyleConfig(font_path=tmp_path / "f.ttf", fill_color=(300, 0, 0, 255))

    def test_rejects_opacity_above_one(self, tmp_path):
        with pytest.raises(ValueError):
            StyleConfig(font_path=tmp_path / "f.ttf", opacity=1.5)


class TestRenderText:
    def test_empty_text(self, any_font):
        with pytest.raises(InputError, match="empty annotation"):
            render_text("", StyleConfig(font_path=any_font), box_at((0, 0), (40, 40), glyph_height=40))

    def test_missing_glyph_names_code_point(self, any_font):
        box = box_at((0, 0), (40, 40), glyph_height=40)
        with pytest.raises(MissingGlyphError, match="U\\+10FFFD"):
            render_text("\U0010FFFD", StyleConfig(font_path=any_font), box)

    def test_unreadable_font(self, tmp_path):
        font = tmp_path / "broken.ttf"
        font.write_bytes(b"definitely not a font")
        with pytest.raises(FontError):
            render_text("A", StyleConfig(font_path=font), box_at((0, 0), (40, 40), glyph_height=40))

    def test_missing_font_file(self, tmp_path):
        with pytest.raises(InputError):
            render_text("A", StyleConfig(font_path=tmp_path / "absent.ttf"), box_at((0, 0), (40, 40), glyph_height=40))

    def test_unrotated_width_is_glyph_count_times_height(self, cjk_font):
        size = text_extent(2, 40, 0)
        patch = render_text("ニコ", StyleConfig(font_path=cjk_font, outline_width=0), box_at((0, 0), size, glyph_height=40))
        assert abs(patch.width - 2 * 40) <= 1
        assert patch.height == 40

    def test_coverage_is_antialiased(self, cjk_font):
        q = quadrants(640, 480)[QuadrantTag.BR]
        box = plan_placement(q, 3, (640, 480), rng_seed=4)
        patch = render_text("ニコッ", StyleConfig(font_path=cjk_font), box)
        assert (patch.width, patch.height) == (box.box_width, box.box_height)
        assert patch.coverage.min() >= 0.0 and patch.coverage.max() <= 1.0
        assert patch.coverage.max() > 0.9
        assert np.any((patch.coverage > 0.0) & (patch.coverage < 1.0))

    def test_outline_and_fill_colors_present(self, cjk_font):
        size = text_extent(1, 60, 4)
        box = box_at((0, 0), size, glyph_height=60, outline_width=4)
        style = StyleConfig(font_path=cjk_font, fill_color=(255, 255, 255, 255), outline_color=(0, 0, 0, 255))
        patch = render_text("ニ", style, box)
        solid = patch.coverage > 0.99
        brightness = patch.color[solid].mean(axis=1)
        assert brightness.max() > 250
        assert brightness.min() < 5

    def test_renders_onto_photo_deterministically(self, cjk_font):
        image = square_image(640, 480, squares=((40, 40, 200),))
        q = quadrants(640, 480)[QuadrantTag.BR]
        box = plan_placement(q, 3, (640, 480), rng_seed=42)
        style = StyleConfig(font_path=cjk_font)
        first = composite(image, render_text("ニコッ", style, box), box, style)
        second = composite(image, render_text("ニコッ", style, box), box, style)
        assert first == second
        assert first != image


def test_mask_visualizer_writes_one_bit_png(tmp_path):
    bits = np.zeros((12, 16), dtype=bool)
    bits[2:6, 3:9] = True
    path = MaskVisualizer(str(tmp_path / "debug")).save_mask(ContourMask(bits), "photo")
    assert path.name == "photo_mask.png"
    with Image.open(path) as written:
        assert written.mode == "1"
        assert written.size == (16, 12)
        assert np.count_nonzero(np.asarray(written)) == 24
