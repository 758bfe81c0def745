//! Static renders on two fixed charts: `z` for `|z| ≤ 1` on the left and
//! `1/z` for `|z| > 1` on the right, each showing `[-1.25, 1.25]²`.

use std::fmt::Write as _;

use afk_core::moebius::BoundaryPoint;
use num_complex::Complex64;

pub type Rgb = [u8; 3];

pub const BLACK: Rgb = [0, 0, 0];
pub const GRAY: Rgb = [150, 150, 150];
pub const LIGHT: Rgb = [215, 215, 215];
pub const RED: Rgb = [200, 30, 30];
pub const BLUE: Rgb = [30, 70, 200];

const EXTENT: f64 = 1.25;

enum Item {
    Points(Vec<BoundaryPoint>, Rgb),
    Curve(Vec<BoundaryPoint>, Rgb),
}

#[derive(Default)]
pub struct Scene {
    items: Vec<Item>,
}

/// Chart index and chart coordinate of a boundary point.
fn chart(p: BoundaryPoint) -> (usize, Complex64) {
    match p {
        BoundaryPoint::Infinity => (1, Complex64::new(0.0, 0.0)),
        BoundaryPoint::Finite(z) if z.norm() <= 1.0 => (0, z),
        BoundaryPoint::Finite(z) => (1, z.inv()),
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    scale(a, 1.0 / n)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Boundary of the ball of boundary-metric radius `r` about `center`: the
/// circle at sphere angle `2r`.
pub fn ball_outline(center: BoundaryPoint, r: f64, samples: usize) -> Vec<BoundaryPoint> {
    let c = center.to_sphere();
    let helper = if c[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot = helper[0] * c[0] + helper[1] * c[1] + helper[2] * c[2];
    let e1 = normalize(sub(helper, scale(c, dot)));
    let e2 = cross(c, e1);
    let (s, co) = (2.0 * r).sin_cos();
    (0..=samples)
        .map(|k| {
            let (st, ct) = (std::f64::consts::TAU * k as f64 / samples as f64).sin_cos();
            let v = [
                co * c[0] + s * (ct * e1[0] + st * e2[0]),
                co * c[1] + s * (ct * e1[1] + st * e2[1]),
                co * c[2] + s * (ct * e1[2] + st * e2[2]),
            ];
            BoundaryPoint::from_sphere(v)
        })
        .collect()
}

impl Scene {
    pub fn points(&mut self, pts: impl IntoIterator<Item = BoundaryPoint>, color: Rgb) {
        self.items.push(Item::Points(pts.into_iter().collect(), color));
    }

    pub fn ball(&mut self, center: BoundaryPoint, r: f64, color: Rgb) {
        self.items.push(Item::Curve(ball_outline(center, r, 720), color));
    }

    /// Chart-space segments of every curve, split where the curve changes chart.
    fn segments(curve: &[BoundaryPoint]) -> Vec<(usize, Complex64, Complex64)> {
        curve
            .windows(2)
            .filter_map(|w| {
                let (ca, a) = chart(w[0]);
                let (cb, b) = chart(w[1]);
                (ca == cb).then_some((ca, a, b))
            })
            .collect()
    }

    fn frame() -> Vec<BoundaryPoint> {
        (0..=360)
            .map(|k| BoundaryPoint::new(Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / 360.0)))
            .collect()
    }

    pub fn to_ppm(&self, size: usize, comment: &str) -> Vec<u8> {
        let width = 2 * size;
        let mut px = vec![[255u8; 3]; width * size];
        let to_pixel = |c: usize, z: Complex64| -> (f64, f64) {
            let x = (z.re + EXTENT) / (2.0 * EXTENT) * size as f64 + (c * size) as f64;
            let y = (EXTENT - z.im) / (2.0 * EXTENT) * size as f64;
            (x, y)
        };
        let mut put = |x: f64, y: f64, color: Rgb| {
            if x >= 0.0 && y >= 0.0 && (x as usize) < width && (y as usize) < size {
                px[y as usize * width + x as usize] = color;
            }
        };
        let line = |c: usize, a: Complex64, b: Complex64, color: Rgb, put: &mut dyn FnMut(f64, f64, Rgb)| {
            let (x0, y0) = to_pixel(c, a);
            let (x1, y1) = to_pixel(c, b);
            let steps = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).clamp(1, 4 * size);
            for k in 0..=steps {
                let s = k as f64 / steps as f64;
                put(x0 + s * (x1 - x0), y0 + s * (y1 - y0), color);
            }
        };
        let frame = Self::frame();
        for c in 0..2 {
            for w in frame.windows(2) {
                let (a, b) = (w[0].finite().unwrap(), w[1].finite().unwrap());
                line(c, a, b, LIGHT, &mut put);
            }
        }
        for item in &self.items {
            match item {
                Item::Points(pts, color) => {
                    for &p in pts {
                        let (c, z) = chart(p);
                        let (x, y) = to_pixel(c, z);
                        put(x, y, *color);
                    }
                }
                Item::Curve(curve, color) => {
                    for (c, a, b) in Self::segments(curve) {
                        line(c, a, b, *color, &mut put);
                    }
                }
            }
        }
        let mut out = format!("P6\n# {comment}\n{width} {size}\n255\n").into_bytes();
        out.extend(px.iter().flatten());
        out
    }

    pub fn to_svg(&self, size: usize, comment: &str) -> String {
        let width = 2 * size;
        let coord = |c: usize, z: Complex64| {
            let x = (z.re + EXTENT) / (2.0 * EXTENT) * size as f64 + (c * size) as f64;
            let y = (EXTENT - z.im) / (2.0 * EXTENT) * size as f64;
            (x, y)
        };
        let color = |c: Rgb| format!("rgb({},{},{})", c[0], c[1], c[2]);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{size}\" viewBox=\"0 0 {width} {size}\">"
        );
        let _ = writeln!(out, "<!-- {comment} -->");
        let _ = writeln!(out, "<rect width=\"{width}\" height=\"{size}\" fill=\"white\"/>");
        for c in 0..2 {
            let (x, y) = coord(c, Complex64::new(0.0, 0.0));
            let r = size as f64 / (2.0 * EXTENT);
            let _ = writeln!(
                out,
                "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{r:.3}\" fill=\"none\" stroke=\"{}\"/>",
                color(LIGHT)
            );
        }
        for item in &self.items {
            match item {
                Item::Points(pts, col) => {
                    let _ = writeln!(out, "<g fill=\"{}\">", color(*col));
                    for &p in pts {
                        let (c, z) = chart(p);
                        let (x, y) = coord(c, z);
                        let _ = writeln!(out, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"0.6\"/>");
                    }
                    out.push_str("</g>\n");
                }
                Item::Curve(curve, col) => {
                    for (c, a, b) in Self::segments(curve) {
                        let (x0, y0) = coord(c, a);
                        let (x1, y1) = coord(c, b);
                        let _ = writeln!(
                            out,
                            "<line x1=\"{x0:.3}\" y1=\"{y0:.3}\" x2=\"{x1:.3}\" y2=\"{y1:.3}\" stroke=\"{}\"/>",
                            color(*col)
                        );
                    }
                }
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use afk_core::moebius::spherical_distance;

    #[test]
    fn outline_is_at_the_requested_distance() {
        for center in [BoundaryPoint::ZERO, BoundaryPoint::Infinity, BoundaryPoint::from_re_im(0.3, -2.0)] {
            for p in ball_outline(center, 0.4, 64) {
                assert!((spherical_distance(center, p) - 0.4).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ppm_header_and_size() {
        let mut scene = Scene::default();
        scene.points([BoundaryPoint::ZERO, BoundaryPoint::Infinity], BLACK);
        let ppm = scene.to_ppm(40, "c");
        let header = b"P6\n# c\n80 40\n255\n".len();
        assert!(ppm.starts_with(b"P6\n# c\n80 40\n255\n"));
        assert_eq!(ppm.len(), header + 80 * 40 * 3);
        // 0 and ∞ land at the center of their charts
        let at = |x: usize, y: usize| &ppm[header + 3 * (y * 80 + x)..header + 3 * (y * 80 + x) + 3];
        assert_eq!(at(20, 20), &BLACK);
        assert_eq!(at(60, 20), &BLACK);
    }
}
