pub mod census;
pub mod certify;
pub mod sieve;
pub mod spectral;
pub mod walk;

/// What a finished run found, beyond the artifact it wrote.
#[derive(Debug, Default)]
pub struct Verdict {
    /// Measured quantities that exceed their proven bound.
    pub violations: Vec<String>,
    /// Sieve hypotheses that did not hold on the family.
    pub failed_conditions: Vec<String>,
}

impl Verdict {
    pub fn violation(&mut self, msg: String) {
        self.violations.push(msg);
    }

    pub fn failed_condition(&mut self, name: &str) {
        self.failed_conditions.push(name.to_string());
    }
}
