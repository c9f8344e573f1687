use std::fmt;

use serde::{Deserialize, Serialize};

/// How a value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Stirling,
    PowerSeries,
    IntegralRepresentation,
    Krasikov,
    Hankel,
    Recurrence,
    ClosedForm,
    Quadrature,
    GridSearch,
    Limit,
    Underflow,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Stirling => "stirling",
            Method::PowerSeries => "power-series",
            Method::IntegralRepresentation => "integral-representation",
            Method::Krasikov => "krasikov",
            Method::Hankel => "hankel",
            Method::Recurrence => "recurrence",
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::GridSearch => "grid-search",
            Method::Limit => "limit",
            Method::Underflow => "underflow",
        };
        f.write_str(s)
    }
}

/// A computed real number together with a one-sided absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueWithError {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

impl ValueWithError {
    pub fn new(value: f64, error: f64, method: Method) -> Self {
        Self { value, error, method }
    }

    pub fn exact(value: f64, method: Method) -> Self {
        Self::new(value, 0.0, method)
    }

    /// Whether `other` lies within the combined error bars of `self`.
    pub fn agrees_with(&self, other: &ValueWithError) -> bool {
        (self.value - other.value).abs() <= self.error + other.error
    }
}

impl fmt::Display for ValueWithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.2e} ({})", self.value, self.error, self.method)
    }
}
