//! Raster output: bifurcation diagrams and graphs of iterates, written as
//! binary portable pixmaps (P6).

use std::io::Write;

use crate::error::{Error, Result};
use crate::map_core::MapInstance;
use crate::orbit::{self, DEFAULT_TRANSIENT};
use crate::periodic;
use crate::scan::BifurcationScan;

pub type Rgb = [u8; 3];

pub const YELLOW: Rgb = [255, 215, 0];
pub const OLIVE: Rgb = [128, 128, 0];
pub const BLUE: Rgb = [0, 0, 255];
pub const GREEN: Rgb = [0, 128, 0];
pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

/// An RGB image, row-major from the top-left corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pixmap {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Pixmap {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&fill);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        if x < self.width && y < self.height {
            let i = 3 * (y * self.width + x);
            self.data[i..i + 3].copy_from_slice(&c);
        }
    }

    pub fn hline(&mut self, y: usize, c: Rgb) {
        for x in 0..self.width {
            self.set(x, y, c);
        }
    }

    pub fn vline(&mut self, x: usize, c: Rgb) {
        for y in 0..self.height {
            self.set(x, y, c);
        }
    }

    /// Bresenham segment between two pixels.
    pub fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: Rgb) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            if x >= 0 && y >= 0 {
                self.set(x as usize, y as usize, c);
            }
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    pub fn count(&self, pred: impl Fn(Rgb) -> bool) -> usize {
        self.data
            .chunks_exact(3)
            .filter(|p| pred([p[0], p[1], p[2]]))
            .count()
    }

    pub fn write_p6<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn to_p6(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.data.len() + 32);
        self.write_p6(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }
}

/// Maps a value on `axis` to a pixel index in `0..n`, or `None` when it
/// falls outside. `flip` puts the axis maximum at index 0 (image rows).
fn to_pixel(v: f64, axis: (f64, f64), n: usize, flip: bool) -> Option<usize> {
    let (lo, hi) = axis;
    if !(v >= lo && v <= hi) || n == 0 {
        return None;
    }
    let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
    let t = if flip { 1.0 - t } else { t };
    Some(((t * (n - 1) as f64).round() as usize).min(n - 1))
}

/// Figure layout for a bifurcation diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderSpec {
    pub width: usize,
    pub height: usize,
    /// Parameter range along the horizontal axis.
    pub x_axis: (f64, f64),
    /// Value range along the vertical axis, maximum at the top.
    pub y_axis: (f64, f64),
    /// One color per seed, drawn in order so later seeds cover earlier ones.
    pub seed_colors: Vec<Rgb>,
    pub critical_color: Rgb,
    pub background: Rgb,
}

impl RenderSpec {
    /// One pixel column per grid parameter, yellow then blue seeds, and a
    /// vertical range covering every domain of the scan.
    pub fn for_scan(scan: &BifurcationScan, height: usize) -> Self {
        let (lo, hi) = scan.range();
        let y_axis = if scan.base.is_eos() {
            (lo - 1.0, hi)
        } else {
            (0.0, 1.0)
        };
        let seed_colors = if scan.seeds.len() == 1 {
            vec![BLUE]
        } else {
            vec![YELLOW, BLUE]
        };
        Self {
            width: scan.columns.len(),
            height,
            x_axis: (lo, hi),
            y_axis,
            seed_colors,
            critical_color: GREEN,
            background: WHITE,
        }
    }

    /// Replaces yellow by olive, which reads better on white in zooms.
    pub fn with_olive(mut self) -> Self {
        for c in &mut self.seed_colors {
            if *c == YELLOW {
                *c = OLIVE;
            }
        }
        self
    }
}

/// Plots every stored point as one pixel, seed by seed, then draws green
/// horizontal lines at the critical points of the map at the middle of the
/// parameter range.
pub fn render_scan(scan: &BifurcationScan, spec: &RenderSpec) -> Result<Pixmap> {
    if scan
        .columns
        .iter()
        .all(|c| c.points.iter().all(Vec::is_empty))
    {
        return Err(Error::EmptyScan);
    }
    let mut img = Pixmap::new(spec.width, spec.height, spec.background);
    for seed in 0..scan.seeds.len() {
        let color = spec.seed_colors.get(seed).copied().unwrap_or(BLUE);
        for col in &scan.columns {
            let Some(px) = to_pixel(col.param, spec.x_axis, spec.width, false) else {
                continue;
            };
            for &y in &col.points[seed] {
                if let Some(py) = to_pixel(y, spec.y_axis, spec.height, true) {
                    img.set(px, py, color);
                }
            }
        }
    }
    let (lo, hi) = scan.range();
    let mid = scan.map_at(0.5 * (lo + hi))?;
    for c in mid.critical_points().points {
        if let Some(py) = to_pixel(c, spec.y_axis, spec.height, true) {
            img.hline(py, spec.critical_color);
        }
    }
    Ok(img)
}

/// Graph of `F^n` sampled on the domain, with its rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateGraph {
    /// `(x, F^n(x))` at `resolution` evenly spaced points including both
    /// domain ends.
    pub rows: Vec<(f64, f64)>,
    /// Points of attracting orbits whose period divides `n`, i.e.
    /// attracting fixed points of `F^n`, ascending.
    pub attracting_fixed_points: Vec<f64>,
    pub image: Pixmap,
}

pub const GRAPH_IMAGE_SIZE: usize = 800;

/// Attracting fixed points of `F^n` reached from the critical points.
pub fn attracting_fixed_points(m: &MapInstance, n: usize) -> Vec<f64> {
    let mut seeds = m.critical_points().points;
    if seeds.is_empty() {
        let (lo, hi) = m.domain();
        seeds.push(0.5 * (lo + hi));
    }
    let mut found: Vec<f64> = Vec::new();
    for c in seeds {
        let Ok(seg) = orbit::iterate(m, c, DEFAULT_TRANSIENT, 2 * n) else {
            continue;
        };
        let orbit = (1..=n)
            .filter(|&q| n.is_multiple_of(q))
            .find_map(|q| periodic::attracting_orbit_near(&seg, q));
        if let Some(orb) = orbit {
            for p in orb.points {
                if found.iter().all(|f| (f - p).abs() > 1e-9) {
                    found.push(p);
                }
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found
}

pub fn render_iterate_graph(m: &MapInstance, n: usize, resolution: usize) -> Result<IterateGraph> {
    render_iterate_graph_sized(m, n, resolution, GRAPH_IMAGE_SIZE)
}

/// Samples `F^n`, draws it in blue over the black identity diagonal on a
/// square image, and marks attracting fixed points of `F^n` with green
/// horizontal and vertical lines.
pub fn render_iterate_graph_sized(
    m: &MapInstance,
    n: usize,
    resolution: usize,
    size: usize,
) -> Result<IterateGraph> {
    if n == 0 || resolution < 2 {
        return Err(Error::InvalidRange(format!(
            "n = {n}, resolution = {resolution}"
        )));
    }
    let (lo, hi) = m.domain();
    let rows: Vec<(f64, f64)> = (0..resolution)
        .map(|k| {
            let x = if k == resolution - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (resolution - 1) as f64
            };
            (x, m.eval_n(x, n))
        })
        .collect();
    let fixed = attracting_fixed_points(m, n);

    let axis = (lo, hi);
    let mut img = Pixmap::new(size, size, WHITE);
    img.line((0, size as i64 - 1), (size as i64 - 1, 0), BLACK);
    for &p in &fixed {
        if let Some(px) = to_pixel(p, axis, size, false) {
            img.vline(px, GREEN);
        }
        if let Some(py) = to_pixel(p, axis, size, true) {
            img.hline(py, GREEN);
        }
    }
    let pix = |(x, y): (f64, f64)| {
        let px = to_pixel(x, axis, size, false)? as i64;
        // clamp values that leave the domain to the frame
        let py = to_pixel(y.clamp(lo, hi), axis, size, true)? as i64;
        Some((px, py))
    };
    let mut prev = None;
    for &r in &rows {
        let cur = pix(r);
        if let (Some(a), Some(b)) = (prev, cur) {
            img.line(a, b, BLUE);
        } else if let Some(b) = cur {
            img.set(b.0 as usize, b.1 as usize, BLUE);
        }
        prev = cur;
    }
    Ok(IterateGraph {
        rows,
        attracting_fixed_points: fixed,
        image: img,
    })
}
