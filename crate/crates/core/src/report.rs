use serde::{Deserialize, Serialize};

/// Slack at or below which a bound counts as saturated, and above whose
/// negative a bound counts as violated.
pub const SLACK_TOL: f64 = 1e-9;

/// One additive contribution to a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    pub value: f64,
}

/// Result of evaluating one uncertainty relation on one instance.
///
/// `bound` is always the sum of `terms`. Values that explain the bound but are
/// not summed into it (losing branches of a max, the numerator of a ratio,
/// series tail size) go in `details`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub relation: String,
    pub lhs: f64,
    pub bound: f64,
    pub terms: Vec<Term>,
    pub slack: f64,
    pub saturated: bool,
    pub degenerate_flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_used: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub details: Vec<Term>,
}

impl BoundReport {
    pub fn new(relation: impl Into<String>, lhs: f64, terms: Vec<Term>) -> Self {
        let bound = terms.iter().map(|t| t.value).sum::<f64>();
        let slack = lhs - bound;
        BoundReport {
            relation: relation.into(),
            lhs,
            bound,
            terms,
            slack,
            saturated: slack.abs() <= SLACK_TOL,
            degenerate_flags: Vec::new(),
            lambda: None,
            sign_used: None,
            branch: None,
            details: Vec::new(),
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.sign_used = Some(sign);
        self
    }

    pub fn with_flags(mut self, flags: impl IntoIterator<Item = String>) -> Self {
        self.degenerate_flags.extend(flags);
        self
    }

    pub fn with_branch(mut self, branch: impl Into<String>) -> Self {
        self.branch = Some(branch.into());
        self
    }

    pub fn with_detail(mut self, label: impl Into<String>, value: f64) -> Self {
        self.details.push(term(label, value));
        self
    }

    /// Replaces the slack with one computed at higher precision than
    /// `lhs − bound` in f64.
    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self.saturated = slack.abs() <= SLACK_TOL;
        self
    }

    /// lhs ≥ bound within [`SLACK_TOL`].
    pub fn holds(&self) -> bool {
        self.slack >= -SLACK_TOL
    }

    pub fn term(&self, label: &str) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.value)
    }

    pub fn detail(&self, label: &str) -> Option<f64> {
        self.details
            .iter()
            .find(|t| t.label == label)
            .map(|t| t.value)
    }

    /// Multi-line human-readable rendering.
    pub fn render(&self) -> String {
        let mut out = format!("relation: {}\n", self.relation);
        out += &format!("lhs:      {:.12}\n", self.lhs);
        out += &format!("bound:    {:.12}\n", self.bound);
        out += &format!("slack:    {:.3e}\n", self.slack);
        out += &format!("saturated: {}\n", self.saturated);
        if let Some(l) = self.lambda {
            out += &format!("lambda:   {l}\n");
        }
        if let Some(s) = self.sign_used {
            out += &format!("sign:     {s:+}\n");
        }
        if let Some(b) = &self.branch {
            out += &format!("branch:   {b}\n");
        }
        for t in &self.terms {
            out += &format!("  term {:<24} {:.12}\n", t.label, t.value);
        }
        for t in &self.details {
            out += &format!("  detail {:<22} {:.12}\n", t.label, t.value);
        }
        for f in &self.degenerate_flags {
            out += &format!("  degenerate: {f}\n");
        }
        out
    }
}

pub fn term(label: impl Into<String>, value: f64) -> Term {
    Term {
        label: label.into(),
        value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_is_sum_of_terms() {
        let r = BoundReport::new("x", 3.0, vec![term("a", 1.0), term("b", 2.0)]);
        assert_eq!(r.bound, 3.0);
        assert_eq!(r.slack, 0.0);
        assert!(r.saturated);
        assert!(r.holds());
        let r = BoundReport::new("x", 1.0, vec![term("a", 2.0)]);
        assert!(!r.holds());
        assert!(!r.saturated);
    }

    #[test]
    fn json_shape() {
        let r = BoundReport::new("mp2", 1.0, vec![term("vaidman_sum", 0.5)]).with_lambda(1.0);
        let s = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(!s.contains("sign_used"));
    }
}
