//! Witness records shared by the check reports and the suite JSON output.

use serde::Serialize;

/// A concrete input that exhibits a pass, failure or notable value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub label: String,
    pub value: f64,
    pub detail: String,
}

impl Witness {
    pub fn new(label: impl Into<String>, value: f64, detail: impl Into<String>) -> Witness {
        Witness {
            label: label.into(),
            value,
            detail: detail.into(),
        }
    }
}

/// Keeps the worst (largest) value seen together with its witness.
#[derive(Clone, Debug)]
pub(crate) struct Worst {
    pub value: f64,
    pub witness: Option<Witness>,
}

impl Default for Worst {
    fn default() -> Self {
        Worst {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }
}

impl Worst {
    /// Worst value, or 0 when nothing was offered.
    pub fn max_or_zero(&self) -> f64 {
        if self.witness.is_none() {
            0.0
        } else {
            self.value
        }
    }

    pub fn offer(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        if !self.value.is_nan() && (value.is_nan() || value > self.value) {
            self.value = value;
            self.witness = Some(witness());
        }
    }
}
