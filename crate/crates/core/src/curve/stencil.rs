//! Periodic finite differences that do not straddle curvature jumps.
//!
//! A sampled support function is only `C^{1,1}`: its second derivative
//! jumps where an arc meets a vertex, and the first derivative itself jumps
//! across the support of a geodesic segment (a corner of the dual). Central
//! stencils smear those jumps, so each sample picks the most central
//! five-point stencil whose cells avoid every detected jump, falling back to
//! three points when none fits.

use nalgebra::{Matrix5, Vector5};

/// First and second derivative of uniformly sampled periodic data.
#[derive(Debug, Clone)]
pub(crate) struct Derivatives {
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
}

/// Five-point weights for derivative order `order` at offset `-shift`
/// (nodes `-shift..=4-shift`), unit spacing.
fn weights(shift: isize, order: usize) -> [f64; 5] {
    let mut a = Matrix5::zeros();
    for (j, o) in (-shift..5 - shift).enumerate() {
        let mut p = 1.0;
        for m in 0..5 {
            a[(m, j)] = p;
            p *= o as f64 / (m + 1) as f64;
        }
    }
    let mut rhs = Vector5::zeros();
    rhs[order] = 1.0;
    let w = a.lu().solve(&rhs).expect("Vandermonde system is regular");
    [w[0], w[1], w[2], w[3], w[4]]
}

fn median(v: &[f64]) -> f64 {
    let mut w: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    w.sort_by(f64::total_cmp);
    w[w.len() / 2]
}

/// Flags cells `(i, i+1)` across which the data has a jump in its first or
/// second derivative.
///
/// A slope jump `J` inside a cell makes `|Δ²y_i + Δ²y_{i+1}| ≈ |J|·dx`
/// peak on that cell; a jump in `y''` makes the third difference centered
/// on the cell peak at `≈ |J|·dx²/2`. Peaks are measured against the median
/// so smooth data only yields isolated, harmless flags.
fn kinks(y: &[f64]) -> Vec<bool> {
    let n = y.len();
    let ni = n as isize;
    let at = |i: isize| y[i.rem_euclid(ni) as usize];
    let wrap = |i: isize| i.rem_euclid(ni) as usize;
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * (1.0 + scale);
    let d2: Vec<f64> = (0..ni).map(|i| at(i + 1) - 2.0 * at(i) + at(i - 1)).collect();
    let s: Vec<f64> = (0..n).map(|i| (d2[i] + d2[(i + 1) % n]).abs()).collect();
    let d3: Vec<f64> = (0..ni)
        .map(|i| (at(i + 2) - 3.0 * at(i + 1) + 3.0 * at(i) - at(i - 1)).abs())
        .collect();
    let peak = |v: &[f64], i: usize, tau: f64| {
        v[i] > tau && v[i] >= v[(i + n - 1) % n] && v[i] > v[(i + 1) % n]
    };
    let ts = 16.0 * median(&s) + floor;
    let t3 = 16.0 * median(&d3) + floor;
    let mut bad = vec![false; n];
    // a step in y'' also raises s, but evenly on both sides; a slope jump
    // stands out against the cells two away
    let background = |i: usize| s[(i + n - 2) % n].max(s[(i + 2) % n]);
    for i in 0..n {
        if peak(&s, i, ts) && s[i] - background(i) > ts {
            bad[i] = true;
        }
    }
    let near_slope = |i: usize| (-2..=2).any(|o| bad[wrap(i as isize + o)]);
    let curv: Vec<usize> = (0..n).filter(|&i| peak(&d3, i, t3) && !near_slope(i)).collect();
    for i in curv {
        bad[i] = true;
    }
    bad
}

pub(crate) fn derivatives(y: &[f64], dx: f64) -> Derivatives {
    let n = y.len();
    let bad = kinks(y);
    let w1: Vec<[f64; 5]> = (0..5).map(|s| weights(s, 1)).collect();
    let w2: Vec<[f64; 5]> = (0..5).map(|s| weights(s, 2)).collect();
    let pick_shift = |i: isize| {
        [2isize, 1, 3, 0, 4]
            .into_iter()
            .find(|&s| (i - s..i - s + 4).all(|c| !bad[c.rem_euclid(n as isize) as usize]))
    };
    let at = |i: isize| y[i.rem_euclid(n as isize) as usize];
    let cell_bad = |i: isize| bad[i.rem_euclid(n as isize) as usize];
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 0..n as isize {
        let (a, b) = match pick_shift(i) {
            Some(s) => {
                let (mut a, mut b) = (0.0, 0.0);
                for j in 0..5 {
                    let v = at(i - s + j as isize);
                    a += w1[s as usize][j] * v;
                    b += w2[s as usize][j] * v;
                }
                (a, b)
            }
            None => {
                let (l, c, r) = (at(i - 1), at(i), at(i + 1));
                let a = if !cell_bad(i) {
                    r - c
                } else if !cell_bad(i - 1) {
                    c - l
                } else {
                    0.5 * (r - l)
                };
                (a, r - 2.0 * c + l)
            }
        };
        d1[i as usize] = a / dx;
        d2[i as usize] = b / (dx * dx);
    }
    Derivatives { d1, d2 }
}

/// Value and first derivative at `x` of the polynomial through
/// `(nodes[j], vals[j])`.
fn lagrange(nodes: &[f64], vals: &[f64], x: f64) -> (f64, f64) {
    let k = nodes.len();
    let (mut p, mut dp) = (0.0, 0.0);
    for j in 0..k {
        let mut l = 1.0;
        let mut dl = 0.0;
        for m in (0..k).filter(|&m| m != j) {
            let d = nodes[j] - nodes[m];
            let t = (x - nodes[m]) / d;
            dl = dl * t + l / d;
            l *= t;
        }
        p += vals[j] * l;
        dp += vals[j] * dl;
    }
    (p, dp)
}

/// Piecewise polynomial interpolant of periodic samples that never
/// interpolates across a detected jump.
///
/// A clean cell uses five nodes around it; a cell containing a jump is
/// split where the one-sided cubics from its two sides meet.
pub(crate) struct Interpolant<'a> {
    y: &'a [f64],
    dx: f64,
    bad: Vec<bool>,
    split: Vec<f64>,
}

impl<'a> Interpolant<'a> {
    pub fn new(y: &'a [f64]) -> Self {
        let n = y.len();
        let dx = std::f64::consts::TAU / n as f64;
        let bad = kinks(y);
        let mut it = Self { y, dx, bad, split: vec![f64::NAN; n] };
        for i in 0..n {
            if it.bad[i] {
                let (ln, lv) = it.side(i as isize, true);
                let (rn, rv) = it.side(i as isize, false);
                it.split[i] = meeting_point(|x| lagrange(&ln, &lv, x).0 - lagrange(&rn, &rv, x).0);
            }
        }
        it
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    fn at(&self, i: isize) -> f64 {
        self.y[i.rem_euclid(self.y.len() as isize) as usize]
    }

    fn cell_bad(&self, i: isize) -> bool {
        self.bad[i.rem_euclid(self.y.len() as isize) as usize]
    }

    /// Nodes `lo..lo+k` relative to cell `i` and their values.
    fn nodes(&self, i: isize, lo: isize, k: isize) -> (Vec<f64>, Vec<f64>) {
        ((lo..lo + k).map(|o| o as f64).collect(), (lo..lo + k).map(|o| self.at(i + o)).collect())
    }

    /// One-sided nodes for a jump cell.
    fn side(&self, i: isize, left: bool) -> (Vec<f64>, Vec<f64>) {
        if left {
            let k = (1..4).take_while(|&m| !self.cell_bad(i - m)).count() as isize + 1;
            self.nodes(i, 1 - k, k)
        } else {
            let k = (1..4).take_while(|&m| !self.cell_bad(i + m)).count() as isize + 1;
            self.nodes(i, 1, k)
        }
    }

    /// Interpolation nodes of a clean cell.
    fn clean(&self, i: isize) -> (Vec<f64>, Vec<f64>) {
        // nodes i-s..i-s+4 need cells i-s..i-s+3 clean
        match [1isize, 2, 0, 3]
            .into_iter()
            .find(|&s| (i - s..i - s + 4).all(|c| !self.cell_bad(c)))
        {
            Some(s) => self.nodes(i, -s, 5),
            None => self.nodes(i, 0, 2),
        }
    }

    /// The pieces covering cell `i`: `(from, to, nodes, values)` in cell units.
    fn cell(&self, i: isize) -> Vec<(f64, f64, Vec<f64>, Vec<f64>)> {
        let i = i.rem_euclid(self.y.len() as isize);
        if !self.bad[i as usize] {
            let (n, v) = self.clean(i);
            return vec![(0.0, 1.0, n, v)];
        }
        let s = self.split[i as usize];
        let (ln, lv) = self.side(i, true);
        let (rn, rv) = self.side(i, false);
        vec![(0.0, s, ln, lv), (s, 1.0, rn, rv)]
    }

    /// Value and derivative at `x` (any real, taken periodically).
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let u = x / self.dx;
        let i = u.floor();
        let frac = u - i;
        let mut pieces = self.cell(i as isize);
        let k = pieces.iter().position(|p| frac <= p.1).unwrap_or(pieces.len() - 1);
        let (_, _, n, v) = pieces.swap_remove(k);
        let (p, d) = lagrange(&n, &v, frac);
        (p, d / self.dx)
    }

    /// `∫₀^{2π} f(y, y') dx`, Gauss–Legendre on every cell piece.
    pub fn integrate(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        const NODES: [f64; 4] = [
            -0.861_136_311_594_052_6,
            -0.339_981_043_584_856_3,
            0.339_981_043_584_856_3,
            0.861_136_311_594_052_6,
        ];
        const WEIGHTS: [f64; 4] = [
            0.347_854_845_137_453_9,
            0.652_145_154_862_546_1,
            0.652_145_154_862_546_1,
            0.347_854_845_137_453_9,
        ];
        (0..self.y.len() as isize)
            .map(|i| {
                self.cell(i)
                    .into_iter()
                    .map(|(a, b, n, v)| {
                        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
                        (0..4)
                            .map(|q| {
                                let (p, d) = lagrange(&n, &v, c + h * NODES[q]);
                                WEIGHTS[q] * f(p, d / self.dx)
                            })
                            .sum::<f64>()
                            * h
                            * self.dx
                    })
                    .sum::<f64>()
            })
            .sum()
    }
}

/// `∫₀^{2π} f(y, y') dx` for periodic samples `y` on a uniform grid.
pub(crate) fn integrate(y: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    Interpolant::new(y).integrate(f)
}

/// Where two one-sided interpolants cross inside `[0, 1]`; the closest
/// approach if they do not.
fn meeting_point(diff: impl Fn(f64) -> f64) -> f64 {
    const K: usize = 32;
    let xs: Vec<f64> = (0..=K).map(|k| k as f64 / K as f64).collect();
    let ds: Vec<f64> = xs.iter().map(|&x| diff(x)).collect();
    for k in 0..K {
        if ds[k] == 0.0 {
            return xs[k];
        }
        if ds[k] * ds[k + 1] < 0.0 {
            let (mut a, mut b) = (xs[k], xs[k + 1]);
            let sa = ds[k].signum();
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if diff(m).signum() == sa {
                    a = m;
                } else {
                    b = m;
                }
            }
            return 0.5 * (a + b);
        }
    }
    let k = (0..=K)
        .min_by(|&a, &b| ds[a].abs().total_cmp(&ds[b].abs()))
        .unwrap();
    xs[k]
}
