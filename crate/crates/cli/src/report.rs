//! Report assembly and rendering. Reports are plain data: given the same
//! config and seed they render byte for byte identically, so wall-clock
//! timing never enters them (commands print timing to stderr instead).

/// Output styles for a rendered report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    /// Section headers with `key: value` lines.
    Text,
    /// Flat machine-readable `section.key=value` lines.
    KeyValue,
}

/// One titled block of a report, with an optional pass/fail verdict.
#[derive(Clone, Debug)]
pub struct Section {
    title: String,
    entries: Vec<(String, String)>,
    verdict: Option<bool>,
}

impl Section {
    pub fn new(title: impl Into<String>) -> Self {
        Section { title: title.into(), entries: Vec::new(), verdict: None }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn verdict(&mut self, pass: bool) {
        self.verdict = Some(pass);
    }
}

/// A whole report: ordered sections, rendered in either format.
#[derive(Clone, Debug, Default)]
pub struct Report {
    sections: Vec<Section>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn add(&mut self, section: Section) {
        self.sections.push(section);
    }

    /// False when any section carries a failed verdict.
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| s.verdict != Some(false))
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::KeyValue => self.render_kv(),
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            out.push_str(&format!("== {} ==\n", s.title));
            for (k, v) in &s.entries {
                out.push_str(&format!("{k}: {v}\n"));
            }
            if let Some(pass) = s.verdict {
                out.push_str(&format!("verdict: {}\n", if pass { "pass" } else { "FAIL" }));
            }
            out.push('\n');
        }
        out
    }

    fn render_kv(&self) -> String {
        let mut out = String::new();
        for s in &self.sections {
            let prefix = s.title.replace(' ', "_");
            for (k, v) in &s.entries {
                out.push_str(&format!("{prefix}.{}={v}\n", k.replace(' ', "_")));
            }
            if let Some(pass) = s.verdict {
                out.push_str(&format!("{prefix}.verdict={}\n", if pass { "pass" } else { "fail" }));
            }
        }
        out
    }
}
