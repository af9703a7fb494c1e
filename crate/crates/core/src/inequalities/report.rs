use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One inequality instance. `value` is `(rhs - lhs) / scale`; `raw` is unscaled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub label: String,
    pub value: f64,
    pub raw: f64,
}

/// Result of checking one family of inequalities.
///
/// `pass` holds exactly when every margin is at least `-tol`. `hypothesis`
/// records whether the input satisfies the theorem's hypothesis; a failing
/// report outside the hypothesis is data, not a bug.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InequalityReport {
    pub name: String,
    pub parameters: Map<String, Value>,
    pub margins: Vec<Margin>,
    pub min_margin: f64,
    pub scale: f64,
    pub tol: f64,
    pub hypothesis: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
}

impl InequalityReport {
    pub fn new(name: &str, hypothesis: bool, scale: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            parameters: Map::new(),
            margins: Vec::new(),
            min_margin: f64::INFINITY,
            scale,
            tol,
            hypothesis,
            pass: true,
            counterexample: None,
        }
    }

    pub fn param(mut self, key: &str, value: Value) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, label: impl Into<String>, raw: f64) {
        let value = raw / self.scale;
        self.min_margin = self.min_margin.min(value);
        self.margins.push(Margin { label: label.into(), value, raw });
    }

    /// Sets `pass`, attaching `payload()` when some margin fails.
    pub fn finish(mut self, payload: impl FnOnce() -> Value) -> Self {
        self.pass = self.margins.iter().all(|m| m.value >= -self.tol);
        if !self.pass {
            self.counterexample = Some(payload());
        }
        self
    }

    pub fn worst(&self) -> Option<&Margin> {
        self.margins.iter().min_by(|a, b| a.value.total_cmp(&b.value))
    }
}
