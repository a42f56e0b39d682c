//! Reporting helpers for the acceptance suite in `tests/acceptance.rs`.

/// Individual checks of one acceptance criterion.
#[derive(Debug, Default)]
pub struct Checks {
    items: Vec<(bool, String)>,
}

impl Checks {
    pub fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.items.push((ok, what.into()));
    }

    pub fn passed(&self) -> bool {
        self.items.iter().all(|(ok, _)| *ok)
    }

    /// `k/m checks; ...` with every check listed and misses marked.
    pub fn summary(&self) -> String {
        let passed = self.items.iter().filter(|(ok, _)| *ok).count();
        let lines: Vec<String> = self
            .items
            .iter()
            .map(|(ok, s)| if *ok { s.clone() } else { format!("MISSED {s}") })
            .collect();
        format!("{passed}/{} checks; {}", self.items.len(), lines.join("; "))
    }
}

/// One output line: `PASS criterion 3 (title, 0.2s): ...`.
pub fn report_line(index: usize, title: &str, seconds: f64, checks: &Checks) -> String {
    let status = if checks.passed() { "PASS" } else { "FAIL" };
    format!("{status} criterion {index} ({title}, {seconds:.1}s): {}", checks.summary())
}
