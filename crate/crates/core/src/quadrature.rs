//! Gauss-Legendre rules and adaptive integration in one and two dimensions.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of an `n`-point Gauss-Legendre rule on `[−1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pn_1 = if n == 1 { 1.0 } else { p0 };
                derivative = nf * (x * pn - pn_1) / (x * x - 1.0);
                let step = pn / derivative;
                x -= step;
                if step.abs() <= 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ₐᵇ f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        sum * half
    }

    /// Tensor-product rule over a rectangle.
    pub fn integrate_2d<F: Fn(f64, f64) -> f64>(&self, f: &F, rect: Rect) -> f64 {
        let hx = 0.5 * (rect.x1 - rect.x0);
        let mx = 0.5 * (rect.x0 + rect.x1);
        let hy = 0.5 * (rect.y1 - rect.y0);
        let my = 0.5 * (rect.y0 + rect.y1);
        let mut total = 0.0;
        for (&xi, &wi) in self.nodes.iter().zip(&self.weights) {
            let x = mx + hx * xi;
            let mut row = 0.0;
            for (&yj, &wj) in self.nodes.iter().zip(&self.weights) {
                row += wj * f(x, my + hy * yj);
            }
            total += wi * row;
        }
        total * hx * hy
    }
}

fn rule_1d() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

fn rule_2d() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(16))
}

const MAX_DEPTH_1D: u32 = 60;
const MAX_DEPTH_2D: u32 = 16;

fn converged(fine: f64, coarse: f64, tol: f64) -> bool {
    (fine - coarse).abs() <= tol.max(64.0 * f64::EPSILON * fine.abs())
}

/// Adaptive Gauss-Legendre integration of `f` over `[a, b]`.
///
/// The interval is first cut into panels of width at most one; a panel is
/// accepted once its 15-point estimate and the sum over its two halves agree
/// within the panel's share of `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let rule = rule_1d();
    let panels = (b - a).abs().ceil().clamp(1.0, 1e6) as usize;
    let width = (b - a) / panels as f64;
    let share = tol / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        let whole = rule.integrate(&f, lo, hi);
        total += refine_1d(&f, rule, lo, hi, whole, share, 0)?;
    }
    Ok(total)
}

fn refine_1d<F: Fn(f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(f, a, mid);
    let right = rule.integrate(f, mid, b);
    let fine = left + right;
    if converged(fine, whole, tol) {
        return Ok(fine);
    }
    if depth >= MAX_DEPTH_1D {
        return Err(Error::NonConvergence {
            routine: "adaptive 1-D quadrature",
            detail: format!(
                "panel [{a}, {b}] still differs by {:e}",
                (fine - whole).abs()
            ),
        });
    }
    Ok(refine_1d(f, rule, a, mid, left, 0.5 * tol, depth + 1)?
        + refine_1d(f, rule, mid, b, right, 0.5 * tol, depth + 1)?)
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, lo, hi)
    }

    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }
}

/// Adaptive tensor-product Gauss-Legendre integration over a rectangle.
///
/// Each panel's 16×16 estimate is compared with the sum over its four
/// quarters; panels are subdivided until the difference is within their
/// share of `tol`. The first `min_depth` levels are always subdivided so
/// that narrow features of the integrand cannot hide between nodes.
pub fn adaptive_integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    rect: Rect,
    tol: f64,
    min_depth: u32,
) -> Result<f64> {
    if rect.x0 == rect.x1 || rect.y0 == rect.y1 {
        return Ok(0.0);
    }
    let rule = rule_2d();
    let whole = rule.integrate_2d(&f, rect);
    refine_2d(&f, rule, rect, whole, tol, 0, min_depth)
}

fn refine_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    rule: &GaussLegendre,
    rect: Rect,
    whole: f64,
    tol: f64,
    depth: u32,
    min_depth: u32,
) -> Result<f64> {
    let quarters = rect.quarters();
    let parts = quarters.map(|q| rule.integrate_2d(f, q));
    let fine: f64 = parts.iter().sum();
    if depth >= min_depth && converged(fine, whole, tol) {
        return Ok(fine);
    }
    if depth >= MAX_DEPTH_2D {
        return Err(Error::NonConvergence {
            routine: "adaptive 2-D quadrature",
            detail: format!("panel {rect:?} still differs by {:e}", (fine - whole).abs()),
        });
    }
    let mut total = 0.0;
    for (q, part) in quarters.into_iter().zip(parts) {
        total += refine_2d(f, rule, q, part, 0.25 * tol, depth + 1, min_depth)?;
    }
    Ok(total)
}
