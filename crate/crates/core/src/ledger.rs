//! Inequality records shared by the a priori estimates and the certificates.

use serde::{Serialize, Serializer};

/// Relative slack granted to every recorded inequality for floating rounding.
pub const ROUNDING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub id: String,
    pub lhs: f64,
    /// `+inf` (serialized as `null`) when the bound is vacuous.
    #[serde(serialize_with = "finite_or_null")]
    pub rhs: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub margin: f64,
    pub pass: bool,
    /// Diagnostic entries are reported but do not decide the run.
    pub gating: bool,
}

pub(crate) fn finite_or_null<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

impl LedgerEntry {
    /// Records `lhs <= rhs`.
    pub fn le(id: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let slack = ROUNDING_SLACK
            * 1.0_f64
                .max(lhs.abs())
                .max(if rhs.is_finite() { rhs.abs() } else { 0.0 });
        let pass = lhs.is_finite() && (rhs == f64::INFINITY || lhs <= rhs + slack);
        Self {
            id: id.into(),
            lhs,
            rhs,
            margin: rhs - lhs,
            pass,
            gating: true,
        }
    }

    pub fn diagnostic(mut self) -> Self {
        self.gating = false;
        self
    }

    /// Worst case of a family `lhs_k <= rhs_k`, judged by margin relative to `max(1, |rhs|)`.
    pub fn worst_of(id: impl Into<String>, pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let id = id.into();
        let mut worst: Option<(f64, f64, f64)> = None;
        for (lhs, rhs) in pairs {
            let rel = if lhs.is_nan() || rhs.is_nan() {
                f64::NEG_INFINITY
            } else {
                (rhs - lhs) / 1.0_f64.max(rhs.abs())
            };
            if worst.map_or(true, |w| rel < w.2) {
                worst = Some((lhs, rhs, rel));
            }
        }
        let (lhs, rhs, _) = worst.unwrap_or((0.0, 0.0, 0.0));
        Self::le(id, lhs, rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

impl Ledger {
    pub fn push(&mut self, e: LedgerEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, other: Ledger) {
        self.entries.extend(other.entries);
    }

    /// Every gating entry passes.
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass || !e.gating)
    }

    /// Failed gating entries.
    pub fn violations(&self) -> Vec<&LedgerEntry> {
        self.entries
            .iter()
            .filter(|e| !e.pass && e.gating)
            .collect()
    }

    pub fn get(&self, id: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}
