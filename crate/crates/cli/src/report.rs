use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Warn,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    pub value: Option<f64>,
    pub bound: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Vec<CheckResult>,
    pub outputs: Map<String, Value>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Map::new(),
            results: Vec::new(),
            outputs: Map::new(),
            exit_code: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) {
        self.inputs.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn output(&mut self, key: &str, value: impl Serialize) {
        self.outputs.insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, check: &str, passed: bool, detail: impl Into<String>) -> &mut CheckResult {
        let status = if passed { Status::Pass } else { Status::Fail };
        self.push(check, status, detail)
    }

    pub fn warn(&mut self, check: &str, detail: impl Into<String>) -> &mut CheckResult {
        self.push(check, Status::Warn, detail)
    }

    fn push(&mut self, check: &str, status: Status, detail: impl Into<String>) -> &mut CheckResult {
        self.results.push(CheckResult { check: check.to_string(), status, value: None, bound: None, detail: detail.into() });
        self.results.last_mut().expect("just pushed")
    }

    /// Marks the whole run as an input error.
    pub fn input_error(&mut self, message: String) {
        self.results.push(CheckResult { check: "input".into(), status: Status::Error, value: None, bound: None, detail: message });
        self.exit_code = 2;
    }

    pub fn finish(&mut self) {
        if self.exit_code != 2 {
            self.exit_code = i32::from(self.results.iter().any(|r| r.status == Status::Fail));
        }
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Warn => "warn",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("{status:>5}  {}", r.check));
            if let Some(v) = r.value {
                out.push_str(&format!("  value={v:e}"));
            }
            if let Some(b) = r.bound {
                out.push_str(&format!("  bound={b:e}"));
            }
            if !r.detail.is_empty() {
                out.push_str(&format!("  {}", r.detail));
            }
            out.push('\n');
        }
        out.push_str(&format!("{}: exit {}\n", self.command, self.exit_code));
        out
    }
}

impl CheckResult {
    pub fn value(&mut self, v: f64) -> &mut Self {
        self.value = Some(v);
        self
    }

    pub fn bound(&mut self, b: f64) -> &mut Self {
        self.bound = Some(b);
        self
    }
}
