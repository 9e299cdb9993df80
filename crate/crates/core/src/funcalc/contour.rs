use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opcore::{CMatrix, C64};

pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_CLEARANCE: f64 = 1e-6;

// nodes summed sequentially inside a chunk, chunks combined in order
const CHUNK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: C64, radius: f64) -> Self {
        Circle { center, radius }
    }

    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    fn boundary_distance(&self, z: C64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }
}

/// Ray `{ s·e^{iθ} : s ≥ 0 }` along which a logarithm branch is cut.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchCut {
    pub angle: f64,
}

impl Default for BranchCut {
    fn default() -> Self {
        BranchCut { angle: PI }
    }
}

impl BranchCut {
    pub fn new(angle: f64) -> Self {
        BranchCut { angle }
    }

    pub fn is_principal(&self) -> bool {
        (self.angle - PI).abs() < 1e-15
    }

    /// Argument in `(angle − 2π, angle]`.
    pub fn arg(&self, z: C64) -> f64 {
        let mut a = z.arg();
        while a > self.angle {
            a -= TAU;
        }
        while a <= self.angle - TAU {
            a += TAU;
        }
        a
    }

    pub fn log(&self, z: C64) -> C64 {
        C64::new(z.norm().ln(), self.arg(z))
    }

    pub fn distance(&self, z: C64) -> f64 {
        let rotated = z * C64::from_polar(1.0, -self.angle);
        if rotated.re <= 0.0 {
            z.norm()
        } else {
            rotated.im.abs()
        }
    }

    /// The default cut rotated by the smallest angle that keeps every point
    /// at least `clearance` away from it. Angles are scanned in steps of
    /// `π/4096`, alternating sides.
    pub fn clearing(points: &[C64], clearance: f64) -> Result<BranchCut> {
        if let Some(z) = points.iter().find(|z| z.norm() <= clearance) {
            return Err(Error::EigenvalueOnCut(*z));
        }
        let step = PI / 4096.0;
        for k in 0..=4096 {
            for sign in [1.0, -1.0] {
                let cut = BranchCut::new(PI + sign * step * k as f64);
                if points.iter().all(|&z| cut.distance(z) >= clearance) {
                    return Ok(cut);
                }
                if k == 0 {
                    break;
                }
            }
        }
        Err(Error::EigenvalueOnCut(points[0]))
    }
}

/// Union of circles, each discretized with `nodes` trapezoidal nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub circles: Vec<Circle>,
    pub nodes: usize,
    #[serde(default)]
    pub cut: BranchCut,
    #[serde(default = "default_clearance")]
    pub clearance: f64,
}

fn default_clearance() -> f64 {
    DEFAULT_CLEARANCE
}

impl Contour {
    pub fn circle(center: C64, radius: f64, nodes: usize) -> Self {
        Self::union(vec![Circle::new(center, radius)], nodes)
    }

    pub fn union(circles: Vec<Circle>, nodes: usize) -> Self {
        Contour {
            circles,
            nodes,
            cut: BranchCut::default(),
            clearance: DEFAULT_CLEARANCE,
        }
    }

    pub fn with_cut(mut self, cut: BranchCut) -> Self {
        self.cut = cut;
        self
    }

    pub fn with_clearance(mut self, clearance: f64) -> Self {
        self.clearance = clearance;
        self
    }

    fn check_shape(&self) -> Result<()> {
        if self.circles.is_empty() || self.nodes == 0 {
            return Err(Error::InvalidOperator(
                "contour needs at least one circle and one node".into(),
            ));
        }
        if self
            .circles
            .iter()
            .any(|c| !(c.radius.is_finite() && c.radius > 0.0))
        {
            return Err(Error::InvalidOperator("circle radius must be positive".into()));
        }
        Ok(())
    }

    /// Clearance check shared by every use of the contour.
    pub fn check_clearance(&self, eigenvalues: &[C64]) -> Result<()> {
        self.check_shape()?;
        for &z in eigenvalues {
            for c in &self.circles {
                let d = c.boundary_distance(z);
                if d < self.clearance {
                    return Err(Error::ContourClearance {
                        eigenvalue: z,
                        distance: d,
                        clearance: self.clearance,
                    });
                }
            }
        }
        Ok(())
    }

    /// Hypotheses for the logarithm and fractional powers: every eigenvalue
    /// enclosed, and each disc clear of 0 and of the branch cut.
    pub fn check_for_log(&self, eigenvalues: &[C64]) -> Result<()> {
        self.check_clearance(eigenvalues)?;
        for &z in eigenvalues {
            if !self.circles.iter().any(|c| c.contains(z)) {
                return Err(Error::EigenvalueNotEnclosed(z));
            }
        }
        for c in &self.circles {
            if c.center.norm() <= c.radius {
                return Err(Error::ContourEnclosesZero);
            }
            if self.cut.distance(c.center) <= c.radius {
                return Err(Error::ContourCrossesCut(self.cut.angle));
            }
        }
        Ok(())
    }

    /// Circles enclosing `targets` whose discs avoid `obstacles`, and
    /// optionally 0 and `cut`. Targets are grouped by splitting the longest
    /// minimum-spanning-tree edge until every group fits a disc whose radius
    /// is at most 3/4 of its distance to the nearest obstacle.
    pub fn design(
        targets: &[C64],
        obstacles: &[C64],
        avoid: Option<BranchCut>,
        nodes: usize,
    ) -> Result<Contour> {
        if targets.is_empty() {
            return Err(Error::InvalidOperator("no eigenvalues to enclose".into()));
        }
        let mut circles = Vec::new();
        let mut pending = vec![targets.to_vec()];
        while let Some(group) = pending.pop() {
            let center = group.iter().sum::<C64>() / group.len() as f64;
            let inner = group
                .iter()
                .map(|z| (z - center).norm())
                .fold(0.0_f64, f64::max);
            let mut outer = targets
                .iter()
                .chain(obstacles)
                .filter(|z| !group.contains(z))
                .map(|z| (z - center).norm())
                .fold(f64::INFINITY, f64::min);
            if let Some(cut) = avoid {
                outer = outer.min(center.norm()).min(cut.distance(center));
            }
            if inner <= 0.75 * outer && outer > 0.0 {
                let radius = if outer.is_finite() {
                    (inner.max(0.25 * outer) * outer).sqrt()
                } else {
                    (2.0 * inner).max(1.0)
                };
                circles.push(Circle::new(center, radius));
            } else if group.len() == 1 || inner == 0.0 {
                return match avoid {
                    Some(_) if center.norm() == 0.0 => Err(Error::ContourEnclosesZero),
                    Some(_) => Err(Error::EigenvalueOnCut(center)),
                    None => Err(Error::InvalidOperator(
                        "target eigenvalue coincides with an obstacle".into(),
                    )),
                };
            } else {
                let (a, b) = split_longest_edge(&group);
                pending.push(b);
                pending.push(a);
            }
        }
        circles.sort_by(|a, b| {
            a.center
                .re
                .total_cmp(&b.center.re)
                .then(a.center.im.total_cmp(&b.center.im))
        });
        let mut contour = Contour::union(circles, nodes);
        if let Some(cut) = avoid {
            contour.cut = cut;
        }
        Ok(contour)
    }

    /// `(1/2πi) ∮ f(λ) (λI − m)⁻¹ dλ` by the trapezoidal rule on each circle.
    pub fn integrate(&self, m: &CMatrix, f: impl Fn(C64) -> C64 + Sync) -> Result<CMatrix> {
        self.check_shape()?;
        let n = m.nrows();
        let nodes = self.nodes;
        let points: Vec<(usize, Circle)> = self
            .circles
            .iter()
            .flat_map(|c| (0..nodes).map(move |k| (k, *c)))
            .collect();
        let partials: Vec<Result<CMatrix>> = points
            .par_chunks(CHUNK)
            .enumerate()
            .map(|(chunk, items)| {
                let mut acc = CMatrix::zeros(n, n);
                for (offset, &(k, circle)) in items.iter().enumerate() {
                    let theta = TAU * k as f64 / nodes as f64;
                    let w = C64::from_polar(circle.radius, theta);
                    let lambda = circle.center + w;
                    let mut shifted = -m.clone();
                    for i in 0..n {
                        shifted[(i, i)] += lambda;
                    }
                    let resolvent = shifted.lu().try_inverse().ok_or(Error::SingularResolvent {
                        node: chunk * CHUNK + offset,
                        lambda,
                    })?;
                    acc += resolvent * (f(lambda) * w);
                }
                Ok(acc)
            })
            .collect();
        let mut total = CMatrix::zeros(n, n);
        for p in partials {
            total += p?;
        }
        total /= C64::new(nodes as f64, 0.0);
        if total.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(total)
    }
}

fn split_longest_edge(points: &[C64]) -> (Vec<C64>, Vec<C64>) {
    // Prim's algorithm; parent[i] links i into the tree
    let k = points.len();
    let mut in_tree = vec![false; k];
    let mut best = vec![f64::INFINITY; k];
    let mut parent = vec![usize::MAX; k];
    best[0] = 0.0;
    for _ in 0..k {
        let u = (0..k)
            .filter(|&i| !in_tree[i])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .expect("non-empty");
        in_tree[u] = true;
        for v in 0..k {
            let d = (points[u] - points[v]).norm();
            if !in_tree[v] && d < best[v] {
                best[v] = d;
                parent[v] = u;
            }
        }
    }
    let cut = (1..k)
        .max_by(|&a, &b| best[a].total_cmp(&best[b]))
        .expect("at least two points");
    // side containing `cut` after removing edge (cut, parent[cut])
    let mut side = vec![false; k];
    side[cut] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..k {
            if !side[v] && parent[v] != usize::MAX && side[parent[v]] && v != cut {
                side[v] = true;
                changed = true;
            }
        }
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for (i, &p) in points.iter().enumerate() {
        if side[i] {
            b.push(p);
        } else {
            a.push(p);
        }
    }
    (a, b)
}
