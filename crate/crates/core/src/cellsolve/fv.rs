//! Cell-centred finite volumes on a graded tensor grid of the strip
//! |N| ≤ L, period 1 in S.
//!
//! Obstacle edges lie on cell faces: slits are cut faces, squares are
//! removed blocks of cells. Cells shrink geometrically toward tips and
//! corners. The far boundaries carry flux (Neumann) or value (Dirichlet)
//! conditions; because every row beyond the obstacle is complete, the
//! S-mean of the discrete solution is exactly linear there and the
//! far-field constants are read off without truncation error.

use crate::error::{Error, Result};
use crate::geometry::WireShape;
use crate::numerics::linalg::BandedSpd;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Obstacle {
    /// On N = 0 for |S| ≤ half.
    TangentialSlit { half: f64 },
    /// On S = 0 for |N| ≤ half.
    PerpendicularSlit { half: f64 },
    /// |N|, |S| ≤ half.
    Block { half: f64 },
}

impl Obstacle {
    pub fn from_shape(shape: WireShape, delta: f64) -> Result<Self> {
        Ok(match shape {
            WireShape::TangentialSegment => Obstacle::TangentialSlit { half: delta },
            WireShape::PerpendicularSegment => Obstacle::PerpendicularSlit { half: delta },
            WireShape::Square => Obstacle::Block { half: delta * std::f64::consts::FRAC_1_SQRT_2 },
            WireShape::Disk => {
                return Err(Error::NotImplemented("disks are not grid-aligned; use the multipole solver".into()))
            }
        })
    }

    fn n_breaks(&self) -> Vec<f64> {
        match *self {
            Obstacle::TangentialSlit { .. } => vec![0.0],
            Obstacle::PerpendicularSlit { half } | Obstacle::Block { half } => vec![-half, half],
        }
    }

    fn s_breaks(&self) -> Vec<f64> {
        match *self {
            Obstacle::TangentialSlit { half } | Obstacle::Block { half } => {
                if half >= 0.5 {
                    vec![]
                } else {
                    vec![-half, half]
                }
            }
            Obstacle::PerpendicularSlit { .. } => vec![0.0],
        }
    }

    /// Largest |N| reached by the obstacle.
    pub fn extent(&self) -> f64 {
        match *self {
            Obstacle::TangentialSlit { .. } => 0.0,
            Obstacle::PerpendicularSlit { half } | Obstacle::Block { half } => half,
        }
    }
}

/// Which cell problem to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// Φ⁺: zero on the wire, slope 1 at +∞, bounded at −∞.
    DirichletPlus,
    /// Φ⁻: zero on the wire, slope −1 at −∞, bounded at +∞.
    DirichletMinus,
    /// Ψ: insulating wire, slope 1 at both ends.
    Neumann,
    /// Ψ̌: insulating wire, ΔΨ̌ = −1.
    NeumannCheck,
}

/// Grid resolution: smallest and largest cell, growth ratio, half-length L.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub h_min: f64,
    pub h_max: f64,
    pub ratio: f64,
    pub n_max: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self { h_min: 1.0 / 32.0, h_max: 1.0 / 8.0, ratio: 1.25, n_max: 4.0 }
    }
}

/// Cell sizes filling [x0, x1], graded toward the flagged ends.
fn graded(x0: f64, x1: f64, lo: bool, hi: bool, p: &GridParams) -> Vec<f64> {
    let len = x1 - x0;
    let grow = |target: f64| {
        let mut v = Vec::new();
        let mut h = p.h_min;
        let mut sum = 0.0;
        while sum < target - 1e-12 {
            v.push(h);
            sum += h;
            h = (h * p.ratio).min(p.h_max);
        }
        let scale = target / sum;
        v.iter().map(|x| x * scale).collect::<Vec<_>>()
    };
    match (lo, hi) {
        (true, true) => {
            let half = grow(len / 2.0);
            let mut v = half.clone();
            v.extend(half.iter().rev());
            v
        }
        (true, false) => grow(len),
        (false, true) => {
            let mut v = grow(len);
            v.reverse();
            v
        }
        (false, false) => {
            let n = (len / p.h_max).ceil().max(1.0) as usize;
            vec![len / n as f64; n]
        }
    }
}

fn faces(lo: f64, hi: f64, breaks: &[f64], graded_ends: (bool, bool), p: &GridParams) -> Vec<f64> {
    let mut pts = vec![lo];
    pts.extend_from_slice(breaks);
    pts.push(hi);
    let mut out = vec![lo];
    for k in 0..pts.len() - 1 {
        let (a, b) = (pts[k], pts[k + 1]);
        let ga = if k == 0 { graded_ends.0 } else { true };
        let gb = if k + 2 == pts.len() { graded_ends.1 } else { true };
        let mut x = a;
        for h in graded(a, b, ga, gb, p) {
            x += h;
            out.push(x);
        }
        *out.last_mut().unwrap() = b;
    }
    out
}

/// Tensor grid of cell faces.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub n_faces: Vec<f64>,
    pub s_faces: Vec<f64>,
}

impl Grid {
    pub fn new(obstacle: &Obstacle, p: &GridParams) -> Self {
        let n_faces = faces(-p.n_max, p.n_max, &obstacle.n_breaks(), (false, false), p);
        let sb = obstacle.s_breaks();
        // Seams at S = ±½ are periodic; grade toward them only if a break is there.
        let s_faces = faces(-0.5, 0.5, &sb, (false, false), p);
        Self { n_faces, s_faces }
    }

    /// Split every cell in two.
    pub fn refined(&self) -> Self {
        let split = |f: &[f64]| {
            let mut out = vec![f[0]];
            for w in f.windows(2) {
                out.push(0.5 * (w[0] + w[1]));
                out.push(w[1]);
            }
            out
        };
        Self { n_faces: split(&self.n_faces), s_faces: split(&self.s_faces) }
    }

    pub fn nn(&self) -> usize {
        self.n_faces.len() - 1
    }

    pub fn ns(&self) -> usize {
        self.s_faces.len() - 1
    }

    pub fn n_center(&self, i: usize) -> f64 {
        0.5 * (self.n_faces[i] + self.n_faces[i + 1])
    }

    pub fn s_center(&self, j: usize) -> f64 {
        0.5 * (self.s_faces[j] + self.s_faces[j + 1])
    }

    pub fn dn(&self, i: usize) -> f64 {
        self.n_faces[i + 1] - self.n_faces[i]
    }

    pub fn ds(&self, j: usize) -> f64 {
        self.s_faces[j + 1] - self.s_faces[j]
    }

    pub fn min_spacing(&self) -> f64 {
        let m = |f: &[f64]| f.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        m(&self.n_faces).min(m(&self.s_faces))
    }
}

/// Discrete solution, row-major (i over N, j over S); NaN inside blocks.
#[derive(Debug, Clone)]
pub struct FvSolution {
    pub grid: Grid,
    pub values: Vec<f64>,
}

fn blocked(ob: &Obstacle, n: f64, s: f64) -> bool {
    match *ob {
        Obstacle::Block { half } => n.abs() < half && s.abs() < half,
        _ => false,
    }
}

/// Is the N-face between rows i and i+1 cut in column j?
fn cut_n_face(ob: &Obstacle, g: &Grid, i: usize, j: usize) -> bool {
    match *ob {
        Obstacle::TangentialSlit { half } => {
            g.n_faces[i + 1].abs() < 1e-14 && g.s_center(j).abs() < half
        }
        _ => false,
    }
}

/// Is the S-face between columns j and j+1 (periodic) cut in row i?
fn cut_s_face(ob: &Obstacle, g: &Grid, i: usize, j: usize) -> bool {
    match *ob {
        Obstacle::PerpendicularSlit { half } => {
            j + 1 < g.ns() && g.s_faces[j + 1].abs() < 1e-14 && g.n_center(i).abs() < half
        }
        _ => false,
    }
}

pub fn solve(grid: &Grid, ob: &Obstacle, problem: Problem) -> Result<FvSolution> {
    let (nn, ns) = (grid.nn(), grid.ns());
    let dirichlet_wire = matches!(problem, Problem::DirichletPlus | Problem::DirichletMinus);
    let l = grid.n_faces[nn];
    let mut a = BandedSpd::zeros(nn * ns, ns);
    let mut b = vec![0.0; nn * ns];
    let idx = |i: usize, j: usize| i * ns + j;
    let is_blocked = |i: usize, j: usize| blocked(ob, grid.n_center(i), grid.s_center(j));
    for i in 0..nn {
        for j in 0..ns {
            let k = idx(i, j);
            if is_blocked(i, j) {
                a.add(k, k, 1.0);
                continue;
            }
            let (dn, ds) = (grid.dn(i), grid.ds(j));
            // Upper N-face.
            if i + 1 < nn {
                if is_blocked(i + 1, j) || cut_n_face(ob, grid, i, j) {
                    if dirichlet_wire {
                        a.add(k, k, ds / (0.5 * dn));
                    }
                } else {
                    let t = ds / (0.5 * (dn + grid.dn(i + 1)));
                    a.add(k, k, t);
                    a.add(k + ns, k + ns, t);
                    a.add(k, k + ns, -t);
                }
            } else {
                let slope = match problem {
                    Problem::DirichletPlus | Problem::Neumann => 1.0,
                    Problem::DirichletMinus => 0.0,
                    Problem::NeumannCheck => -l,
                };
                b[k] += slope * ds;
            }
            // Lower neighbour handled by its own upper face, except blocks/cuts.
            if i > 0 {
                if (is_blocked(i - 1, j) || cut_n_face(ob, grid, i - 1, j)) && dirichlet_wire {
                    a.add(k, k, ds / (0.5 * dn));
                }
            } else {
                match problem {
                    Problem::DirichletPlus => {}
                    Problem::DirichletMinus => b[k] += ds,
                    Problem::Neumann | Problem::NeumannCheck => a.add(k, k, ds / (0.5 * dn)),
                }
            }
            // S-face to the right (periodic).
            let jr = (j + 1) % ns;
            let kr = idx(i, jr);
            if is_blocked(i, jr) || cut_s_face(ob, grid, i, j) {
                if dirichlet_wire {
                    a.add(k, k, dn / (0.5 * ds));
                }
            } else {
                let t = dn / (0.5 * (ds + grid.ds(jr)));
                a.add(k, k, t);
                a.add(kr, kr, t);
                a.add(k, kr, -t);
            }
            let jl = (j + ns - 1) % ns;
            if (is_blocked(i, jl) || cut_s_face(ob, grid, i, jl)) && dirichlet_wire {
                a.add(k, k, dn / (0.5 * ds));
            }
            if problem == Problem::NeumannCheck {
                b[k] += dn * ds;
            }
        }
    }
    let mut values = a.factor()?.solve(&b);
    for i in 0..nn {
        for j in 0..ns {
            if is_blocked(i, j) {
                values[idx(i, j)] = f64::NAN;
            }
        }
    }
    Ok(FvSolution { grid: grid.clone(), values })
}

impl FvSolution {
    /// S-mean of row i.
    pub fn row_mean(&self, i: usize) -> f64 {
        let ns = self.grid.ns();
        (0..ns).map(|j| self.values[i * ns + j] * self.grid.ds(j)).sum()
    }

    /// Least-squares polynomial fit of the row means over rows whose centres
    /// lie in [lo, hi]; returns coefficients in powers of N and max residual.
    pub fn profile_fit(&self, lo: f64, hi: f64, order: usize) -> (Vec<f64>, f64) {
        let rows: Vec<usize> = (0..self.grid.nn())
            .filter(|&i| {
                let n = self.grid.n_center(i);
                n >= lo && n <= hi
            })
            .collect();
        let pts: Vec<(f64, f64)> = rows.iter().map(|&i| (self.grid.n_center(i), self.row_mean(i))).collect();
        super::poly_fit(&pts, order)
    }
}

/// Richardson extrapolation of a sequence on grids refined by 2; returns
/// (extrapolated value, size of the last correction).
///
/// The scheme is first order at the obstacle with an h² remainder, so the
/// h and h² terms are eliminated in turn.
pub fn richardson(values: &[f64]) -> (f64, f64) {
    match values.len() {
        0 => (f64::NAN, f64::INFINITY),
        1 => (values[0], f64::INFINITY),
        2 => {
            let e = 2.0 * values[1] - values[0];
            (e, (e - values[1]).abs())
        }
        n => {
            let (v0, v1, v2) = (values[n - 3], values[n - 2], values[n - 1]);
            let first = 2.0 * v2 - v1;
            let e = (8.0 * v2 - 6.0 * v1 + v0) / 3.0;
            (e, (e - first).abs())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_cells_fill_interval() {
        let p = GridParams::default();
        for &(a, b, lo, hi) in &[(0.0, 4.0, true, false), (-0.45, 0.45, true, true), (0.45, 0.5, true, false)] {
            let v = graded(a, b, lo, hi, &p);
            let s: f64 = v.iter().sum();
            assert!((s - (b - a)).abs() < 1e-12);
            assert!(v.iter().all(|&h| h <= p.h_max * 1.0001));
        }
    }

    #[test]
    fn empty_strip_is_exactly_linear() {
        // A vanishing slit leaves Ψ = N + L exactly.
        let ob = Obstacle::PerpendicularSlit { half: 1e-9 };
        let g = Grid::new(&ob, &GridParams::default());
        let sol = solve(&g, &ob, Problem::Neumann).unwrap();
        let (c, r) = sol.profile_fit(3.0, 4.0, 1);
        assert!((c[1] - 1.0).abs() < 1e-10);
        assert!(r < 1e-10);
    }

    #[test]
    fn richardson_removes_h_and_h2() {
        let f = |h: f64| 0.7 + 0.3 * h - 2.0 * h * h;
        let (e, change) = richardson(&[f(0.1), f(0.05), f(0.025)]);
        assert!((e - 0.7).abs() < 1e-14);
        assert!(change > 0.0);
    }
}
