use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Rgb(pub u8, pub u8, pub u8);

impl Rgb {
    pub const WHITE: Rgb = Rgb(255, 255, 255);
    pub const BLACK: Rgb = Rgb(0, 0, 0);
    pub const GREEN: Rgb = Rgb(0, 255, 0);
    pub const GRAY: Rgb = Rgb(128, 128, 128);
}

/// Packed 8-bit RGB raster, row-major from the top-left corner.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canvas {
    width: u32,
    height: u32,
    rgb: Vec<u8>,
}

impl Canvas {
    pub fn new(width: u32, height: u32, fill: Rgb) -> Self {
        let rgb = [fill.0, fill.1, fill.2].repeat(width as usize * height as usize);
        Self { width, height, rgb }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_rgb(&self) -> &[u8] {
        &self.rgb
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        Rgb(self.rgb[i], self.rgb[i + 1], self.rgb[i + 2])
    }

    pub fn set(&mut self, x: i64, y: i64, c: Rgb) {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            return;
        }
        let i = 3 * (y as usize * self.width as usize + x as usize);
        self.rgb[i..i + 3].copy_from_slice(&[c.0, c.1, c.2]);
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.rgb.chunks_exact(3).map(|p| Rgb(p[0], p[1], p[2]))
    }

    pub fn draw_border(&mut self, c: Rgb) {
        let (w, h) = (self.width as i64, self.height as i64);
        for x in 0..w {
            self.set(x, 0, c);
            self.set(x, h - 1, c);
        }
        for y in 0..h {
            self.set(0, y, c);
            self.set(w - 1, y, c);
        }
    }

    /// Filled disc of the given radius around the pixel containing (x, y).
    pub fn draw_disc(&mut self, x: f64, y: f64, radius: u32, c: Rgb) {
        if !x.is_finite() || !y.is_finite() {
            return;
        }
        let (cx, cy) = (x.floor() as i64, y.floor() as i64);
        let r = radius as i64;
        for dy in -r..=r {
            for dx in -r..=r {
                if dx * dx + dy * dy <= r * r {
                    self.set(cx + dx, cy + dy, c);
                }
            }
        }
    }

    /// 1px Bresenham segment between continuous pixel coordinates, clipped to
    /// the canvas first.
    pub fn draw_line(&mut self, a: (f64, f64), b: (f64, f64), c: Rgb) {
        let Some((a, b)) = clip(a, b, self.width as f64, self.height as f64) else {
            return;
        };
        let to_px = |v: f64, max: u32| (v.floor() as i64).clamp(0, max as i64 - 1);
        let (mut x0, mut y0) = (to_px(a.0, self.width), to_px(a.1, self.height));
        let (x1, y1) = (to_px(b.0, self.width), to_px(b.1, self.height));
        let dx = (x1 - x0).abs();
        let dy = -(y1 - y0).abs();
        let sx = if x0 < x1 { 1 } else { -1 };
        let sy = if y0 < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.set(x0, y0, c);
            if x0 == x1 && y0 == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x0 += sx;
            }
            if e2 <= dx {
                err += dx;
                y0 += sy;
            }
        }
    }
}

/// Liang-Barsky clip of a segment to [0, w] x [0, h].
fn clip(a: (f64, f64), b: (f64, f64), w: f64, h: f64) -> Option<((f64, f64), (f64, f64))> {
    if ![a.0, a.1, b.0, b.1].iter().all(|v| v.is_finite()) {
        return None;
    }
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a.0), (dx, w - a.0), (-dy, a.1), (dy, h - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (a.0 + t0 * dx, a.1 + t0 * dy),
        (a.0 + t1 * dx, a.1 + t1 * dy),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(c: &Canvas, color: Rgb) -> usize {
        c.pixels().filter(|&p| p == color).count()
    }

    #[test]
    fn horizontal_and_diagonal_lines() {
        let mut c = Canvas::new(20, 20, Rgb::WHITE);
        c.draw_line((2.5, 3.5), (12.5, 3.5), Rgb::BLACK);
        assert_eq!(count(&c, Rgb::BLACK), 11);
        let mut d = Canvas::new(20, 20, Rgb::WHITE);
        d.draw_line((0.5, 0.5), (9.5, 9.5), Rgb::BLACK);
        assert_eq!(count(&d, Rgb::BLACK), 10);
        for k in 0..10 {
            assert_eq!(d.get(k, k), Rgb::BLACK);
        }
    }

    #[test]
    fn far_segments_are_clipped() {
        let mut c = Canvas::new(16, 16, Rgb::WHITE);
        c.draw_line((-1e9, 8.5), (1e9, 8.5), Rgb::BLACK);
        assert_eq!(count(&c, Rgb::BLACK), 16);
        let mut e = Canvas::new(16, 16, Rgb::WHITE);
        e.draw_line((-5.0, -5.0), (-1.0, 30.0), Rgb::BLACK);
        assert_eq!(count(&e, Rgb::BLACK), 0);
    }

    #[test]
    fn disc_has_expected_area() {
        let mut c = Canvas::new(32, 32, Rgb::WHITE);
        c.draw_disc(16.2, 16.7, 3, Rgb::GREEN);
        assert_eq!(count(&c, Rgb::GREEN), 29);
        assert_eq!(c.get(16, 16), Rgb::GREEN);
    }

    #[test]
    fn border_is_one_pixel() {
        let mut c = Canvas::new(16, 20, Rgb::WHITE);
        c.draw_border(Rgb::GRAY);
        assert_eq!(count(&c, Rgb::GRAY), 2 * 16 + 2 * 20 - 4);
    }
}
