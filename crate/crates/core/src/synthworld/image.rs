use rand::Rng;

/// Image side length in pixels.
pub const IMAGE_SIDE: usize = 32;
/// Rows reserved for the glyph; the ellipse lives strictly below them.
pub const TOP_ROWS: usize = 11;

pub(crate) const CONTENT_DIM: usize = 5;
pub(crate) const SPEC_DIM: usize = 4;

const GLYPH: usize = 5;

/// The glyph alphabet. Every glyph touches all four sides of its 5×5 box, so
/// its bounding box pins down its position.
pub const GLYPHS: [[u8; GLYPH]; 4] = [
    // box
    [0b11111, 0b10001, 0b10001, 0b10001, 0b11111],
    // cross
    [0b10001, 0b01010, 0b00100, 0b01010, 0b10001],
    // plus
    [0b00100, 0b00100, 0b11111, 0b00100, 0b00100],
    // diamond
    [0b00100, 0b01010, 0b10001, 0b01010, 0b00100],
];

fn glyph_bit(g: usize, row: usize, col: usize) -> bool {
    GLYPHS[g][row] >> (GLYPH - 1 - col) & 1 == 1
}

/// Integer values `lo, lo + 1, ..., lo + n - 1`, addressed by parameters in
/// `[0, 1]`.
#[derive(Debug, Clone, Copy)]
struct Lattice {
    lo: i64,
    n: usize,
}

impl Lattice {
    const fn new(lo: i64, n: usize) -> Self {
        Self { lo, n }
    }

    fn index(self, p: f64) -> usize {
        ((p.clamp(0.0, 1.0) * (self.n - 1) as f64).round() as usize).min(self.n - 1)
    }

    fn param(self, idx: usize) -> f64 {
        idx as f64 / (self.n - 1) as f64
    }

    fn value(self, idx: usize) -> i64 {
        self.lo + idx as i64
    }

    fn index_of(self, v: i64) -> Option<usize> {
        let i = v - self.lo;
        (0..self.n as i64).contains(&i).then_some(i as usize)
    }

    fn clamp_index(self, v: i64) -> usize {
        (v - self.lo).clamp(0, self.n as i64 - 1) as usize
    }
}

// center x, center y, radius x, radius y, 8-bit intensity
const CONTENT: [Lattice; CONTENT_DIM] = [
    Lattice::new(8, 16),
    Lattice::new(18, 7),
    Lattice::new(3, 5),
    Lattice::new(3, 5),
    Lattice::new(100, 156),
];
// left x, top y, 8-bit intensity, glyph id
const SPEC: [Lattice; SPEC_DIM] = [
    Lattice::new(0, 28),
    Lattice::new(0, 6),
    Lattice::new(128, 128),
    Lattice::new(0, 4),
];

type ContentIdx = [usize; CONTENT_DIM];
type SpecIdx = [usize; SPEC_DIM];

fn to_indices<const N: usize>(lat: &[Lattice; N], p: &[f64]) -> [usize; N] {
    std::array::from_fn(|i| lat[i].index(p[i]))
}

fn to_params<const N: usize>(lat: &[Lattice; N], idx: &[usize; N]) -> Vec<f64> {
    (0..N).map(|i| lat[i].param(idx[i])).collect()
}

fn level(l: i64) -> f64 {
    l as f64 / 255.0
}

/// Image-family renderer: a filled axis-aligned ellipse (content) in the
/// lower rows and an optional 5×5 glyph (specification) in the top rows.
#[derive(Debug, Clone, Copy, Default)]
pub struct ImageWorld;

impl ImageWorld {
    pub(crate) fn draw<R: Rng>(&self, rng: &mut R, content: bool) -> Vec<f64> {
        let lat: &[Lattice] = if content { &CONTENT } else { &SPEC };
        lat.iter()
            .map(|l| l.param(rng.random_range(0..l.n)))
            .collect()
    }

    pub(crate) fn tolerances(&self) -> (Vec<f64>, Vec<f64>) {
        let half = |l: &Lattice| 0.5 / (l.n - 1) as f64;
        (CONTENT.iter().map(half).collect(), SPEC.iter().map(half).collect())
    }

    pub(crate) fn render(&self, content: &[f64], spec: Option<&[f64]>) -> Vec<f64> {
        let mut img = vec![0.0; IMAGE_SIDE * IMAGE_SIDE];
        paint_content(&mut img, &to_indices(&CONTENT, content));
        if let Some(s) = spec {
            paint_spec(&mut img, &to_indices(&SPEC, s));
        }
        img
    }

    /// Pixel mask of the glyph drawn for `spec`.
    pub fn glyph_support(&self, spec: &[f64]) -> Vec<bool> {
        let idx = to_indices(&SPEC, spec);
        let mut mask = vec![false; IMAGE_SIDE * IMAGE_SIDE];
        let (gx, gy, g) = (SPEC[0].value(idx[0]) as usize, SPEC[1].value(idx[1]) as usize, idx[3]);
        for r in 0..GLYPH {
            for c in 0..GLYPH {
                if glyph_bit(g, r, c) {
                    mask[(gy + r) * IMAGE_SIDE + gx + c] = true;
                }
            }
        }
        mask
    }

    pub(crate) fn decompose(&self, data: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let c = exact_content(data).unwrap_or_else(|| fit_content(data));
        let s = exact_spec(data).unwrap_or_else(|| fit_spec(data));
        let residual = (content_error(data, &c) + spec_error(data, &s)) / data.len() as f64;
        (to_params(&CONTENT, &c), to_params(&SPEC, &s), residual)
    }
}

fn paint_content(img: &mut [f64], idx: &ContentIdx) {
    let [cx, cy, rx, ry, l] = std::array::from_fn::<i64, 5, _>(|i| CONTENT[i].value(idx[i]));
    let v = level(l);
    for y in (cy - ry)..=(cy + ry) {
        for x in (cx - rx)..=(cx + rx) {
            if inside(x, y, cx, cy, rx, ry) {
                img[y as usize * IMAGE_SIDE + x as usize] = v;
            }
        }
    }
}

fn inside(x: i64, y: i64, cx: i64, cy: i64, rx: i64, ry: i64) -> bool {
    let (dx, dy) = (x - cx, y - cy);
    dx * dx * ry * ry + dy * dy * rx * rx <= rx * rx * ry * ry
}

fn paint_spec(img: &mut [f64], idx: &SpecIdx) {
    let gx = SPEC[0].value(idx[0]) as usize;
    let gy = SPEC[1].value(idx[1]) as usize;
    let v = level(SPEC[2].value(idx[2]));
    for r in 0..GLYPH {
        for c in 0..GLYPH {
            if glyph_bit(idx[3], r, c) {
                img[(gy + r) * IMAGE_SIDE + gx + c] = v;
            }
        }
    }
}

fn region(data: &[f64], top: bool) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
    let rows = if top { 0..TOP_ROWS } else { TOP_ROWS..IMAGE_SIDE };
    rows.flat_map(move |y| (0..IMAGE_SIDE).map(move |x| (x, y, data[y * IMAGE_SIDE + x])))
}

fn bbox<I: Iterator<Item = (usize, usize, f64)>>(pixels: I, threshold: f64) -> Option<(i64, i64, i64, i64)> {
    let mut b: Option<(i64, i64, i64, i64)> = None;
    for (x, y, v) in pixels {
        if v > threshold {
            let (x, y) = (x as i64, y as i64);
            b = Some(match b {
                None => (x, x, y, y),
                Some((x0, x1, y0, y1)) => (x0.min(x), x1.max(x), y0.min(y), y1.max(y)),
            });
        }
    }
    b
}

fn content_error(data: &[f64], idx: &ContentIdx) -> f64 {
    let [cx, cy, rx, ry, l] = std::array::from_fn::<i64, 5, _>(|i| CONTENT[i].value(idx[i]));
    let v = level(l);
    region(data, false)
        .map(|(x, y, p)| {
            let want = if inside(x as i64, y as i64, cx, cy, rx, ry) { v } else { 0.0 };
            (p - want).abs()
        })
        .sum()
}

fn spec_error(data: &[f64], idx: &SpecIdx) -> f64 {
    let gx = SPEC[0].value(idx[0]) as usize;
    let gy = SPEC[1].value(idx[1]) as usize;
    let v = level(SPEC[2].value(idx[2]));
    region(data, true)
        .map(|(x, y, p)| {
            let on = (gx..gx + GLYPH).contains(&x)
                && (gy..gy + GLYPH).contains(&y)
                && glyph_bit(idx[3], y - gy, x - gx);
            (p - if on { v } else { 0.0 }).abs()
        })
        .sum()
}

fn exact_content(data: &[f64]) -> Option<ContentIdx> {
    let (x0, x1, y0, y1) = bbox(region(data, false), 0.0)?;
    if (x1 - x0) % 2 != 0 || (y1 - y0) % 2 != 0 {
        return None;
    }
    let (cx, cy) = ((x0 + x1) / 2, (y0 + y1) / 2);
    let centre = data[cy as usize * IMAGE_SIDE + cx as usize];
    let idx = [
        CONTENT[0].index_of(cx)?,
        CONTENT[1].index_of(cy)?,
        CONTENT[2].index_of((x1 - x0) / 2)?,
        CONTENT[3].index_of((y1 - y0) / 2)?,
        CONTENT[4].index_of((centre * 255.0).round() as i64)?,
    ];
    (content_error(data, &idx) == 0.0).then_some(idx)
}

fn exact_spec(data: &[f64]) -> Option<SpecIdx> {
    let (x0, x1, y0, y1) = bbox(region(data, true), 0.0)?;
    if x1 - x0 != GLYPH as i64 - 1 || y1 - y0 != GLYPH as i64 - 1 {
        return None;
    }
    let peak = region(data, true).map(|(_, _, v)| v).fold(0.0, f64::max);
    let partial = [
        SPEC[0].index_of(x0)?,
        SPEC[1].index_of(y0)?,
        SPEC[2].index_of((peak * 255.0).round() as i64)?,
        0,
    ];
    (0..GLYPHS.len())
        .map(|g| {
            let mut idx = partial;
            idx[3] = g;
            idx
        })
        .find(|idx| spec_error(data, idx) == 0.0)
}

/// Best lattice intensity for the pixels under a shape: the L1 cost is
/// convex in the level, so the optimum is a lattice neighbour of the median.
/// Returns `(index, Σ|p − v| − Σ|p|)` over those pixels.
fn best_level(lat: Lattice, under: &mut [f64]) -> (usize, f64) {
    under.sort_by(f64::total_cmp);
    let median = under[under.len() / 2] * 255.0;
    let lo = lat.clamp_index(median.floor() as i64);
    let hi = lat.clamp_index(median.ceil() as i64);
    [lo, hi]
        .into_iter()
        .map(|i| {
            let v = level(lat.value(i));
            (i, under.iter().map(|p| (p - v).abs() - p.abs()).sum::<f64>())
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

/// Exhaustive nearest-parameter fit of the ellipse in L1.
fn fit_content(data: &[f64]) -> ContentIdx {
    let mut best = (f64::INFINITY, [0; CONTENT_DIM]);
    let mut under = Vec::with_capacity(256);
    for i0 in 0..CONTENT[0].n {
        for i1 in 0..CONTENT[1].n {
            for i2 in 0..CONTENT[2].n {
                for i3 in 0..CONTENT[3].n {
                    let [cx, cy, rx, ry] = [CONTENT[0].value(i0), CONTENT[1].value(i1), CONTENT[2].value(i2), CONTENT[3].value(i3)];
                    under.clear();
                    for y in (cy - ry)..=(cy + ry) {
                        for x in (cx - rx)..=(cx + rx) {
                            if inside(x, y, cx, cy, rx, ry) {
                                under.push(data[y as usize * IMAGE_SIDE + x as usize]);
                            }
                        }
                    }
                    let (l, gain) = best_level(CONTENT[4], &mut under);
                    if gain < best.0 {
                        best = (gain, [i0, i1, i2, i3, l]);
                    }
                }
            }
        }
    }
    best.1
}

/// Exhaustive nearest-parameter fit of the glyph in L1.
fn fit_spec(data: &[f64]) -> SpecIdx {
    let mut best = (f64::INFINITY, [0; SPEC_DIM]);
    let mut under = Vec::with_capacity(GLYPH * GLYPH);
    for i0 in 0..SPEC[0].n {
        for i1 in 0..SPEC[1].n {
            for g in 0..GLYPHS.len() {
                let (gx, gy) = (SPEC[0].value(i0) as usize, SPEC[1].value(i1) as usize);
                under.clear();
                for r in 0..GLYPH {
                    for c in 0..GLYPH {
                        if glyph_bit(g, r, c) {
                            under.push(data[(gy + r) * IMAGE_SIDE + gx + c]);
                        }
                    }
                }
                let (l, gain) = best_level(SPEC[2], &mut under);
                if gain < best.0 {
                    best = (gain, [i0, i1, l, g]);
                }
            }
        }
    }
    best.1
}
