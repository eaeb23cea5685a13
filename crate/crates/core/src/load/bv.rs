use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::sub;
use crate::model::operator::SpdOperator;

/// One piece of a load between two consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Segment {
    Constant {
        value: Vec<f64>,
    },
    /// `start + (t - t_i) * slope` on `[t_i, t_{i+1}]`.
    Affine {
        start: Vec<f64>,
        slope: Vec<f64>,
    },
}

impl Segment {
    pub fn dim(&self) -> usize {
        match self {
            Segment::Constant { value } => value.len(),
            Segment::Affine { start, .. } => start.len(),
        }
    }

    fn value_at(&self, offset: f64) -> Vec<f64> {
        match self {
            Segment::Constant { value } => value.clone(),
            Segment::Affine { start, slope } => start
                .iter()
                .zip(slope)
                .map(|(a, b)| a + offset * b)
                .collect(),
        }
    }

    fn slope(&self) -> Option<&[f64]> {
        match self {
            Segment::Constant { .. } => None,
            Segment::Affine { slope, .. } => Some(slope),
        }
    }
}

/// Value a load takes exactly at an interior breakpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum JumpValue {
    Left,
    Right,
    Explicit { value: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    At,
    Left,
    Right,
}

/// A jump (or removable discontinuity) of a load.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub left: Vec<f64>,
    pub at: Vec<f64>,
    pub right: Vec<f64>,
}

/// Piecewise constant / affine load of bounded variation on `[t_0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvLoad {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    at_jump: Vec<JumpValue>,
}

impl BvLoad {
    /// `breakpoints` has one more entry than `segments`; `at_jump` has one entry
    /// per interior breakpoint.
    pub fn new(
        breakpoints: Vec<f64>,
        segments: Vec<Segment>,
        at_jump: Vec<JumpValue>,
    ) -> Result<Self> {
        if segments.is_empty() || breakpoints.len() != segments.len() + 1 {
            return Err(Error::InvalidLoad(format!(
                "{} breakpoints for {} segments",
                breakpoints.len(),
                segments.len()
            )));
        }
        if at_jump.len() + 1 != segments.len() {
            return Err(Error::InvalidLoad(format!(
                "{} jump designations for {} interior breakpoints",
                at_jump.len(),
                segments.len() - 1
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite())
            || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::InvalidLoad(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        let dim = segments[0].dim();
        if dim == 0 {
            return Err(Error::InvalidLoad("zero-dimensional load".into()));
        }
        for s in &segments {
            let ok = match s {
                Segment::Constant { value } => {
                    value.len() == dim && value.iter().all(|x| x.is_finite())
                }
                Segment::Affine { start, slope } => {
                    start.len() == dim
                        && slope.len() == dim
                        && start.iter().chain(slope).all(|x| x.is_finite())
                }
            };
            if !ok {
                return Err(Error::InvalidLoad(
                    "segment dimension mismatch or non-finite value".into(),
                ));
            }
        }
        for j in &at_jump {
            if let JumpValue::Explicit { value } = j {
                if value.len() != dim || value.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidLoad(
                        "explicit jump value has wrong dimension".into(),
                    ));
                }
            }
        }
        Ok(Self {
            breakpoints,
            segments,
            at_jump,
        })
    }

    pub fn constant(horizon: f64, value: Vec<f64>) -> Result<Self> {
        Self::new(
            vec![0.0, horizon],
            vec![Segment::Constant { value }],
            vec![],
        )
    }

    /// Linear ramp from `from` at `t = 0` to `to` at `t = horizon`.
    pub fn ramp(horizon: f64, from: Vec<f64>, to: Vec<f64>) -> Result<Self> {
        let slope = sub(&to, &from).into_iter().map(|x| x / horizon).collect();
        Self::new(
            vec![0.0, horizon],
            vec![Segment::Affine { start: from, slope }],
            vec![],
        )
    }

    /// Piecewise constant load switching from `before` to `after` at `t_jump`,
    /// taking the right limit at the jump.
    pub fn step(horizon: f64, t_jump: f64, before: Vec<f64>, after: Vec<f64>) -> Result<Self> {
        Self::new(
            vec![0.0, t_jump, horizon],
            vec![
                Segment::Constant { value: before },
                Segment::Constant { value: after },
            ],
            vec![JumpValue::Right],
        )
    }

    /// Piecewise constant load with `values[i]` on `(breakpoints[i], breakpoints[i+1])`,
    /// right-continuous at interior breakpoints.
    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = values.len();
        Self::new(
            breakpoints,
            values
                .into_iter()
                .map(|value| Segment::Constant { value })
                .collect(),
            vec![JumpValue::Right; n.saturating_sub(1)],
        )
    }

    pub fn dim(&self) -> usize {
        self.segments[0].dim()
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn horizon(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn at_jump(&self) -> &[JumpValue] {
        &self.at_jump
    }

    pub fn is_piecewise_constant(&self) -> bool {
        self.segments
            .iter()
            .all(|s| matches!(s, Segment::Constant { .. }))
    }

    /// Index of the segment whose closed interval contains `t`, preferring the
    /// segment to the right at breakpoints.
    fn segment_index(&self, t: f64) -> usize {
        let m = self.segments.len();
        let i = self.breakpoints.partition_point(|b| *b <= t);
        i.saturating_sub(1).min(m - 1)
    }

    fn segment_value(&self, i: usize, t: f64) -> Vec<f64> {
        self.segments[i].value_at(t - self.breakpoints[i])
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= self.start() && t <= self.horizon()) {
            return Err(Error::TimeOutsideHorizon {
                t,
                horizon: self.horizon(),
            });
        }
        Ok(())
    }

    /// Evaluates the load, or one of its one-sided limits, at `t`.
    pub fn eval(&self, t: f64, side: Side) -> Result<Vec<f64>> {
        self.check_time(t)?;
        match side {
            Side::Left if t <= self.start() => {
                return Err(Error::TimeOutsideHorizon {
                    t,
                    horizon: self.horizon(),
                })
            }
            Side::Right if t >= self.horizon() => {
                return Err(Error::TimeOutsideHorizon {
                    t,
                    horizon: self.horizon(),
                })
            }
            _ => {}
        }
        Ok(self.eval_unchecked(t, side))
    }

    /// Like [`eval`](Self::eval) but clamps one-sided limits at the ends of the
    /// horizon to the endpoint value.
    pub fn eval_unchecked(&self, t: f64, side: Side) -> Vec<f64> {
        let m = self.segments.len();
        let i = self.segment_index(t);
        // Interior breakpoint hit exactly?
        let at_break = i > 0 && self.breakpoints[i] == t;
        if !at_break {
            if i == m - 1 && t >= self.horizon() {
                return self.segment_value(m - 1, t);
            }
            return self.segment_value(i, t);
        }
        match side {
            Side::Left => self.segment_value(i - 1, t),
            Side::Right => self.segment_value(i, t),
            Side::At => match &self.at_jump[i - 1] {
                JumpValue::Left => self.segment_value(i - 1, t),
                JumpValue::Right => self.segment_value(i, t),
                JumpValue::Explicit { value } => value.clone(),
            },
        }
    }

    /// Affine formula of the piece containing `inside`, evaluated at `t`
    /// (which may be an endpoint of that piece).
    pub fn piece_value(&self, inside: f64, t: f64) -> Vec<f64> {
        self.segment_value(self.segment_index(inside), t)
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        self.eval_unchecked(t, Side::At)
    }

    /// Interior breakpoints where the load is discontinuous.
    pub fn jumps(&self) -> Vec<Jump> {
        (1..self.segments.len())
            .filter_map(|i| {
                let t = self.breakpoints[i];
                let left = self.segment_value(i - 1, t);
                let right = self.segment_value(i, t);
                let at = self.eval_unchecked(t, Side::At);
                (left != right || at != left).then_some(Jump { t, left, at, right })
            })
            .collect()
    }

    /// Total variation on `[a, b]` in the dual metric of `metric`, jumps included.
    pub fn variation(&self, metric: &SpdOperator, a: f64, b: f64) -> f64 {
        let (a, b) = (a.max(self.start()), b.min(self.horizon()));
        if !(a < b) {
            return 0.0;
        }
        let mut total = 0.0;
        for (i, seg) in self.segments.iter().enumerate() {
            let (lo, hi) = (self.breakpoints[i].max(a), self.breakpoints[i + 1].min(b));
            if let (Some(slope), true) = (seg.slope(), lo < hi) {
                total += metric.dual_norm(slope) * (hi - lo);
            }
        }
        for i in 1..self.segments.len() {
            let t = self.breakpoints[i];
            if t < a || t > b {
                continue;
            }
            let left = self.segment_value(i - 1, t);
            let right = self.segment_value(i, t);
            let at = self.eval_unchecked(t, Side::At);
            if a < t {
                total += metric.dual_norm(&sub(&at, &left));
            }
            if t < b {
                total += metric.dual_norm(&sub(&right, &at));
            }
        }
        total
    }

    pub fn total_variation(&self, metric: &SpdOperator) -> f64 {
        self.variation(metric, self.start(), self.horizon())
    }

    /// Supremum of the dual norm over the horizon, designated jump values included.
    pub fn sup_norm(&self, metric: &SpdOperator) -> f64 {
        let mut best = 0.0_f64;
        for (i, _) in self.segments.iter().enumerate() {
            // Norms are convex, so affine pieces peak at an endpoint.
            best = best.max(metric.dual_norm(&self.segment_value(i, self.breakpoints[i])));
            best = best.max(metric.dual_norm(&self.segment_value(i, self.breakpoints[i + 1])));
        }
        for j in &self.at_jump {
            if let JumpValue::Explicit { value } = j {
                best = best.max(metric.dual_norm(value));
            }
        }
        best
    }

    /// Largest slope (dual norm) over the affine pieces.
    pub fn max_rate(&self, metric: &SpdOperator) -> f64 {
        self.segments
            .iter()
            .filter_map(|s| s.slope())
            .map(|s| metric.dual_norm(s))
            .fold(0.0, f64::max)
    }

    /// The load `t -> self(t / factor)` on the stretched horizon.
    pub fn time_scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidLoad(format!("bad time scale {factor}")));
        }
        let breakpoints = self.breakpoints.iter().map(|t| t * factor).collect();
        let segments = self
            .segments
            .iter()
            .map(|s| match s {
                Segment::Constant { value } => Segment::Constant {
                    value: value.clone(),
                },
                Segment::Affine { start, slope } => Segment::Affine {
                    start: start.clone(),
                    slope: slope.iter().map(|x| x / factor).collect(),
                },
            })
            .collect();
        Self::new(breakpoints, segments, self.at_jump.clone())
    }

    /// Same path with a different designated value at every jump.
    pub fn with_jump_values(&self, designation: JumpValue) -> Self {
        let mut out = self.clone();
        for j in &mut out.at_jump {
            *j = designation.clone();
        }
        out
    }
}
