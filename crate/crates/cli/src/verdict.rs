use serde::Serialize;

/// How a measured value is compared with its bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// Strictly below the bound.
    Below,
}

/// One measured quantity against one bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictRecord {
    pub id: String,
    /// What is being checked, in words.
    pub anchor: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_s: f64,
}

impl VerdictRecord {
    /// `pass` is set from the comparison and nothing else.
    pub fn new(
        id: impl Into<String>,
        anchor: impl Into<String>,
        measured: f64,
        relation: Relation,
        bound: f64,
        tolerance: f64,
    ) -> Self {
        let pass = match relation {
            Relation::AtMost => measured <= bound + tolerance,
            Relation::AtLeast => measured >= bound - tolerance,
            Relation::Below => measured < bound + tolerance,
        };
        Self { id: id.into(), anchor: anchor.into(), measured, relation, bound, tolerance, pass, runtime_s: 0.0 }
    }

    pub fn at_most(id: impl Into<String>, anchor: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(id, anchor, measured, Relation::AtMost, bound, 0.0)
    }

    pub fn at_least(id: impl Into<String>, anchor: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::new(id, anchor, measured, Relation::AtLeast, bound, 0.0)
    }

    pub fn timed(mut self, seconds: f64) -> Self {
        self.runtime_s = seconds;
        self
    }

    pub fn line(&self) -> String {
        let op = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
            Relation::Below => "<",
        };
        let tol = if self.tolerance != 0.0 { format!(" ± {:e}", self.tolerance) } else { String::new() };
        format!(
            "{} {}: {:e} {op} {:e}{tol}  ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.measured,
            self.bound,
            self.anchor
        )
    }
}

/// All verdicts of one invocation.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Manifest {
    pub command: String,
    pub action: String,
    pub seed: Option<u64>,
    /// Headline numbers of the run, keyed by name.
    pub summary: std::collections::BTreeMap<String, f64>,
    pub verdicts: Vec<VerdictRecord>,
    pub artifacts: Vec<String>,
}

impl Manifest {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_the_comparison() {
        assert!(VerdictRecord::at_most("a", "x", 1.0, 1.0).pass);
        assert!(!VerdictRecord::at_most("a", "x", 1.0 + 1e-12, 1.0).pass);
        assert!(VerdictRecord::new("a", "x", 1.0 + 1e-12, Relation::AtMost, 1.0, 1e-9).pass);
        assert!(!VerdictRecord::at_least("a", "x", f64::NAN, 0.0).pass);
    }

    #[test]
    fn manifest_json_has_the_fields() {
        let m = Manifest { verdicts: vec![VerdictRecord::at_least("id", "anchor", 2.0, 1.0)], ..Manifest::default() };
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        let r = &v["verdicts"][0];
        for k in ["id", "anchor", "measured", "bound", "pass", "runtime_s"] {
            assert!(!r[k].is_null(), "{k}");
        }
        assert_eq!(r["relation"], "at_least");
    }
}
