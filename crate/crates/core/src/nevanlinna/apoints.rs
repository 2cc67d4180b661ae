//! a-points inside a centred disc and the (truncated) counting function.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BaseSurface, NevanlinnaError, Target};
use crate::expr::{EvalResult, Expr, ExprError};

/// Cells are refined until their diameter is below this.
pub const LOCATE_CELL_DIAMETER: f64 = 1e-8;
/// a-points closer than this to the boundary circle are refused.
const BOUNDARY_GUARD: f64 = 1e-6;
/// Cells are always refined down to this fraction of the search square, so
/// that a zero and a pole rarely share a cell.
const MIN_SPLIT_FRACTION: f64 = 1.0 / 16.0;
const EDGE_SAMPLES: usize = 24;
const MAX_ARG_STEP: f64 = 0.6;
const MAX_BISECTIONS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    UserSupplied,
    ArgumentPrinciple,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct APoint {
    pub z: Complex64,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoleList {
    pub points: Vec<APoint>,
    pub provenance: Provenance,
}

impl ZeroPoleList {
    pub fn user(points: Vec<APoint>) -> Result<ZeroPoleList, NevanlinnaError> {
        if let Some(p) = points.iter().find(|p| p.multiplicity == 0) {
            return Err(NevanlinnaError::InvalidPoints(format!("zero multiplicity at {}", p.z)));
        }
        Ok(ZeroPoleList { points, provenance: Provenance::UserSupplied })
    }

    pub fn empty() -> ZeroPoleList {
        ZeroPoleList { points: Vec::new(), provenance: Provenance::UserSupplied }
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.points.iter().map(|p| p.multiplicity).sum()
    }
}

/// `N^{[k]}(r) = π Σ min(μ, k) g_r(0, x)` over the listed points inside the
/// disc; `k = None` counts full multiplicity.
pub fn counting_n(list: &ZeroPoleList, surface: BaseSurface, r: f64, k: Option<u32>) -> Result<f64, NevanlinnaError> {
    let big_r = surface.euclidean_radius(r)?;
    let mut total = 0.0;
    for p in &list.points {
        let a = p.z.norm();
        if a == 0.0 {
            return Err(NevanlinnaError::APointAtOrigin);
        }
        if a < big_r {
            let mu = k.map_or(p.multiplicity, |k| p.multiplicity.min(k));
            total += mu as f64 * (big_r / a).ln();
        }
    }
    Ok(total)
}

/// Function whose zeros are the `target`-points of `f`, evaluated to `None`
/// where it is infinite or zero-valued to working precision.
struct Probe<'a> {
    f: &'a Expr,
    target: Target,
}

impl Probe<'_> {
    fn eval(&self, z: Complex64) -> Result<Option<Complex64>, NevanlinnaError> {
        let v = match self.f.eval(z) {
            EvalResult::Finite(v) => v,
            EvalResult::Pole(_) => return Ok(None),
            EvalResult::BranchViolation(node) => return Err(ExprError::BranchViolation { node, at: z }.into()),
        };
        let h = match self.target {
            Target::Finite(a) => v - a,
            Target::Infinity => v.inv(),
        };
        Ok((h.is_finite() && h.norm() > 0.0).then_some(h))
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: Complex64,
    hi: Complex64,
}

impl Cell {
    fn diameter(&self) -> f64 {
        (self.hi - self.lo).norm()
    }

    fn corners(&self) -> [Complex64; 4] {
        [self.lo, Complex64::new(self.hi.re, self.lo.im), self.hi, Complex64::new(self.lo.re, self.hi.im)]
    }

    fn split(&self, t: f64) -> [Cell; 4] {
        let m = Complex64::new(
            self.lo.re + t * (self.hi.re - self.lo.re),
            self.lo.im + (1.0 - t) * (self.hi.im - self.lo.im),
        );
        [
            Cell { lo: self.lo, hi: m },
            Cell { lo: Complex64::new(m.re, self.lo.im), hi: Complex64::new(self.hi.re, m.im) },
            Cell { lo: Complex64::new(self.lo.re, m.im), hi: Complex64::new(m.re, self.hi.im) },
            Cell { lo: m, hi: self.hi },
        ]
    }
}

/// Argument increment of `h` along the segment `[a, b]`, or `None` when
/// `h` vanishes or blows up on it.
fn segment_arg(p: &Probe, a: Complex64, b: Complex64) -> Result<Option<f64>, NevanlinnaError> {
    fn rec(
        p: &Probe,
        a: Complex64,
        ha: Complex64,
        b: Complex64,
        hb: Complex64,
        depth: u32,
    ) -> Result<Option<f64>, NevanlinnaError> {
        let step = (hb / ha).arg();
        if step.abs() <= MAX_ARG_STEP || depth >= MAX_BISECTIONS {
            return Ok(Some(step));
        }
        let m = 0.5 * (a + b);
        let Some(hm) = p.eval(m)? else { return Ok(None) };
        let Some(l) = rec(p, a, ha, m, hm, depth + 1)? else { return Ok(None) };
        let Some(r) = rec(p, m, hm, b, hb, depth + 1)? else { return Ok(None) };
        Ok(Some(l + r))
    }
    let mut total = 0.0;
    let mut prev_z = a;
    let Some(mut prev) = p.eval(a)? else { return Ok(None) };
    for i in 1..=EDGE_SAMPLES {
        let z = a + (b - a) * (i as f64 / EDGE_SAMPLES as f64);
        let Some(h) = p.eval(z)? else { return Ok(None) };
        let Some(s) = rec(p, prev_z, prev, z, h, 0)? else { return Ok(None) };
        total += s;
        prev_z = z;
        prev = h;
    }
    Ok(Some(total))
}

/// Winding number of `h` around the cell: zeros minus poles inside.
fn winding(p: &Probe, cell: &Cell) -> Result<Option<i32>, NevanlinnaError> {
    let c = cell.corners();
    let mut total = 0.0;
    for i in 0..4 {
        let Some(s) = segment_arg(p, c[i], c[(i + 1) % 4])? else { return Ok(None) };
        total += s;
    }
    Ok(Some((total / (2.0 * std::f64::consts::PI)).round() as i32))
}

const SPLIT_RATIOS: [f64; 5] = [0.5137, 0.4721, 0.5389, 0.4412, 0.5623];

fn search(
    p: &Probe,
    cell: Cell,
    w: i32,
    coarse: f64,
    out: &mut Vec<APoint>,
) -> Result<(), NevanlinnaError> {
    if w == 0 && cell.diameter() <= coarse {
        return Ok(());
    }
    if cell.diameter() <= LOCATE_CELL_DIAMETER {
        if w > 0 {
            out.push(APoint { z: 0.5 * (cell.lo + cell.hi), multiplicity: w as u32 });
        }
        return Ok(());
    }
    for t in SPLIT_RATIOS {
        let subs = cell.split(t);
        let mut ws = [0i32; 4];
        let mut ok = true;
        for (slot, s) in ws.iter_mut().zip(&subs) {
            match winding(p, s)? {
                Some(v) => *slot = v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && ws.iter().sum::<i32>() == w {
            for (s, v) in subs.into_iter().zip(ws) {
                search(p, s, v, coarse, out)?;
            }
            return Ok(());
        }
    }
    // No split separates the boundary from the a-points; report the cell.
    if w > 0 {
        out.push(APoint { z: 0.5 * (cell.lo + cell.hi), multiplicity: w as u32 });
    }
    Ok(())
}

/// Locates the `target`-points of `f` in the disc of geodesic radius `r` by
/// recursive subdivision with argument-principle winding counts.
pub fn locate_a_points(
    f: &Expr,
    target: Target,
    surface: BaseSurface,
    r: f64,
) -> Result<ZeroPoleList, NevanlinnaError> {
    let big_r = surface.euclidean_radius(r)?;
    let probe = Probe { f, target };
    // Slightly larger than the disc so boundary a-points are seen.
    let half = big_r * (1.0 + 1e-3) + 1e-9;
    let mut root = Cell { lo: Complex64::new(-half, -half), hi: Complex64::new(half, half) };
    let mut w = None;
    for k in 0..8 {
        if let Some(v) = winding(&probe, &root)? {
            w = Some(v);
            break;
        }
        let grow = 1.0 + 1e-3 * (k + 2) as f64;
        root = Cell { lo: root.lo * grow, hi: root.hi * grow };
    }
    let w = w.ok_or(NevanlinnaError::BoundaryZero { at: root.lo })?;
    let mut found = Vec::new();
    search(&probe, root, w, 2.0 * half * MIN_SPLIT_FRACTION, &mut found)?;
    let mut points = Vec::new();
    for p in found {
        let a = p.z.norm();
        if a <= LOCATE_CELL_DIAMETER {
            return Err(NevanlinnaError::APointAtOrigin);
        }
        if (a - big_r).abs() <= BOUNDARY_GUARD {
            return Err(NevanlinnaError::BoundaryZero { at: p.z });
        }
        if a < big_r {
            points.push(p);
        }
    }
    points.sort_by(|a, b| a.z.norm().total_cmp(&b.z.norm()).then(a.z.arg().total_cmp(&b.z.arg())));
    Ok(ZeroPoleList { points, provenance: Provenance::ArgumentPrinciple })
}
