//! Closed-form Kurzweil–Stieltjes pairings between piecewise constant/affine
//! loads and continuous piecewise affine curves.

use crate::error::{Error, Result};
use crate::linalg::{dot, sub};
use crate::load::bv::{BvLoad, Side};
use crate::load::curve::PiecewiseLinearCurve;
use crate::model::operator::SpdOperator;

const DOMAIN_TOL: f64 = 1e-12;

/// Both arguments of the a priori bound `|int <f, dg>| <= min{A, B}` with
/// `A = |f|_inf Var(g)` and `B = (|f(a)| + |f(b)| + Var f) |g|_inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KurzweilBound {
    pub value: f64,
    pub sup_times_variation: f64,
    pub endpoints_times_sup: f64,
}

impl KurzweilBound {
    pub fn rhs(&self) -> f64 {
        self.sup_times_variation.min(self.endpoints_times_sup)
    }

    pub fn holds(&self) -> bool {
        let slack = 1e-12 * (1.0 + self.rhs().abs());
        self.value.abs() <= self.rhs() + slack
    }
}

fn close(x: f64, y: f64) -> bool {
    (x - y).abs() <= DOMAIN_TOL * 1.0_f64.max(x.abs()).max(y.abs())
}

fn check_subinterval(a: f64, b: f64, lo: f64, hi: f64) -> Result<()> {
    let inside = (a >= lo || close(a, lo)) && (b <= hi || close(b, hi));
    if !(a <= b) || !inside {
        return Err(Error::DomainMismatch {
            a0: a,
            a1: b,
            b0: lo,
            b1: hi,
        });
    }
    Ok(())
}

fn check_same_domain(f: &BvLoad, g: &PiecewiseLinearCurve) -> Result<()> {
    if !close(f.start(), g.start()) || !close(f.horizon(), g.end()) {
        return Err(Error::DomainMismatch {
            a0: f.start(),
            a1: f.horizon(),
            b0: g.start(),
            b1: g.end(),
        });
    }
    Ok(())
}

/// Sorted union of the given knots restricted to `[a, b]`, with `a` and `b` included.
fn merged_knots<'a>(a: f64, b: f64, sets: impl IntoIterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut k = vec![a, b];
    for set in sets {
        k.extend(set.iter().copied().filter(|x| *x > a && *x < b));
    }
    k.sort_by(f64::total_cmp);
    k.dedup();
    k
}

/// `int_a^b <f, dg>` for a regulated piecewise load `f` and a continuous curve
/// `g` on a common interval. Values of `f` at isolated points do not contribute.
pub fn bv_dg(f: &BvLoad, g: &PiecewiseLinearCurve) -> Result<f64> {
    check_same_domain(f, g)?;
    bv_dg_on(f, g, g.start(), g.end())
}

pub fn bv_dg_on(f: &BvLoad, g: &PiecewiseLinearCurve, a: f64, b: f64) -> Result<f64> {
    check_subinterval(a, b, f.start().max(g.start()), f.horizon().min(g.end()))?;
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let knots = merged_knots(a, b, [f.breakpoints(), g.grid()]);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (u, v) = (w[0], w[1]);
        let mid = 0.5 * (u + v);
        // f is affine on (u, v) and g' is constant there.
        let fm = f.eval_unchecked(mid, Side::At);
        let slope = g.slope(g.segment_of(mid));
        total += dot(&fm, &slope) * (v - u);
    }
    Ok(total)
}

/// Running values `int_{g_0}^{g_j} <f, dg>` at every node of `g`, by a single
/// merged sweep over the knots.
pub fn bv_dg_cumulative(f: &BvLoad, g: &PiecewiseLinearCurve) -> Result<Vec<f64>> {
    check_same_domain(f, g)?;
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let grid = g.grid();
    let bps = f.breakpoints();
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    let mut total = 0.0;
    let mut b = bps.partition_point(|x| *x <= grid[0]);
    for j in 0..grid.len() - 1 {
        let slope = g.slope(j);
        let mut u = grid[j];
        let end = grid[j + 1];
        while b < bps.len() && bps[b] <= u {
            b += 1;
        }
        loop {
            let v = if b < bps.len() && bps[b] < end {
                bps[b]
            } else {
                end
            };
            let fm = f.eval_unchecked(0.5 * (u + v), Side::At);
            total += dot(&fm, &slope) * (v - u);
            if v == end {
                break;
            }
            u = v;
            b += 1;
        }
        out.push(total);
    }
    Ok(out)
}

/// `int_a^b <f, dg>` for a continuous curve `f` and a regulated piecewise load
/// `g`: jump part tagged at the jump points plus the absolutely continuous part.
pub fn cont_dstep(f: &PiecewiseLinearCurve, g: &BvLoad) -> Result<f64> {
    if !close(f.start(), g.start()) || !close(f.end(), g.horizon()) {
        return Err(Error::DomainMismatch {
            a0: f.start(),
            a1: f.end(),
            b0: g.start(),
            b1: g.horizon(),
        });
    }
    cont_dstep_on(f, g, f.start(), f.end())
}

pub fn cont_dstep_on(f: &PiecewiseLinearCurve, g: &BvLoad, a: f64, b: f64) -> Result<f64> {
    check_subinterval(a, b, f.start().max(g.start()), f.end().min(g.horizon()))?;
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: g.dim(),
        });
    }
    let mut total = 0.0;
    if a == b {
        return Ok(0.0);
    }
    for &t in &g.breakpoints()[1..g.breakpoints().len() - 1] {
        if t < a || t > b {
            continue;
        }
        let at = g.eval_unchecked(t, Side::At);
        let fv = f.eval(t);
        if t > a {
            total += dot(&fv, &sub(&at, &g.eval_unchecked(t, Side::Left)));
        }
        if t < b {
            total += dot(&fv, &sub(&g.eval_unchecked(t, Side::Right), &at));
        }
    }
    let knots = merged_knots(a, b, [g.breakpoints(), f.grid()]);
    for w in knots.windows(2) {
        let (u, v) = (w[0], w[1]);
        let mid = 0.5 * (u + v);
        let i = g.breakpoints().partition_point(|x| *x <= mid) - 1;
        if let crate::load::bv::Segment::Affine { slope, .. } = &g.segments()[i] {
            // f is affine on (u, v): its mean is the midpoint value.
            total += dot(&f.eval(mid), slope) * (v - u);
        }
    }
    Ok(total)
}

/// `int_a^{b-h} <f(s), (g(s+h) - g(s)) / h> ds`, exact on the piecewise structure.
pub fn diff_quotient(f: &BvLoad, g: &PiecewiseLinearCurve, h: f64) -> Result<f64> {
    check_same_domain(f, g)?;
    let (a, b) = (g.start(), g.end());
    if !(h > 0.0 && h < b - a) {
        return Err(Error::DomainMismatch {
            a0: a,
            a1: b - h,
            b0: a,
            b1: b,
        });
    }
    let shifted: Vec<f64> = g.grid().iter().map(|x| x - h).collect();
    let knots = merged_knots(a, b - h, [f.breakpoints(), g.grid(), shifted.as_slice()]);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let (u, v) = (w[0], w[1]);
        let mid = 0.5 * (u + v);
        // The integrand is quadratic on (u, v); f is read off the piece
        // containing (u, v), so designated jump values are ignored.
        let q = |s: f64| {
            let fv = f.piece_value(mid, s);
            let dq: Vec<f64> = sub(&g.eval(s + h), &g.eval(s))
                .into_iter()
                .map(|x| x / h)
                .collect();
            dot(&fv, &dq)
        };
        total += (v - u) * (q(u) + 4.0 * q(mid) + q(v)) / 6.0;
    }
    Ok(total)
}

/// Constant `K` in `|diff_quotient(h) - bv_dg| <= K h`.
pub fn diff_quotient_constant(f: &BvLoad, g: &PiecewiseLinearCurve, metric: &SpdOperator) -> f64 {
    let lip = g.lipschitz_with(|v| metric.norm(v));
    lip * (f.total_variation(metric) + 2.0 * f.sup_norm(metric))
}

/// Bound for `bv_dg(f, g)`: `f` measured in the dual metric, `g` in the metric.
pub fn bv_dg_bound(
    f: &BvLoad,
    g: &PiecewiseLinearCurve,
    metric: &SpdOperator,
) -> Result<KurzweilBound> {
    let value = bv_dg(f, g)?;
    let (a, b) = (g.start(), g.end());
    let g_sup = g.sup_with(|v| metric.norm(v));
    let g_var = g.variation_with(|v| metric.norm(v), a, b);
    let fa = metric.dual_norm(&f.eval_unchecked(a, Side::At));
    let fb = metric.dual_norm(&f.eval_unchecked(b, Side::At));
    Ok(KurzweilBound {
        value,
        sup_times_variation: f.sup_norm(metric) * g_var,
        endpoints_times_sup: (fa + fb + f.total_variation(metric)) * g_sup,
    })
}

/// Bound for `cont_dstep(f, g)`: `f` measured in the metric, `g` in the dual metric.
pub fn cont_dstep_bound(
    f: &PiecewiseLinearCurve,
    g: &BvLoad,
    metric: &SpdOperator,
) -> Result<KurzweilBound> {
    let value = cont_dstep(f, g)?;
    let (a, b) = (f.start(), f.end());
    let f_sup = f.sup_with(|v| metric.norm(v));
    let f_var = f.variation_with(|v| metric.norm(v), a, b);
    let fa = metric.norm(f.node(0));
    let fb = metric.norm(f.node(f.len() - 1));
    Ok(KurzweilBound {
        value,
        sup_times_variation: f_sup * g.total_variation(metric),
        endpoints_times_sup: (fa + fb + f_var) * g.sup_norm(metric),
    })
}
