//! Deterministic result rendering: named sections of key/value rows with
//! a human layout and a machine-oriented layout. Equal reports render to
//! equal bytes in both modes.

use std::fmt::Display;
use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReportSection {
    pub heading: String,
    rows: Vec<(String, String)>,
}

impl ReportSection {
    pub fn new(heading: impl Into<String>) -> Self {
        ReportSection {
            heading: heading.into(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.rows.push((key.into(), value.to_string()));
        self
    }

    pub fn rows(&self) -> &[(String, String)] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    sections: Vec<ReportSection>,
}

fn slug(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if c.is_alphanumeric() || c == '.' || c == '-' || c == '_' {
            out.push(c.to_ascii_lowercase());
        } else if c.is_whitespace() && !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, section: ReportSection) -> &mut Self {
        self.sections.push(section);
        self
    }

    pub fn sections(&self) -> &[ReportSection] {
        &self.sections
    }

    /// Narrative layout: headings with indented `key: value` rows in
    /// insertion order.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        writeln!(out, "== {} ==", self.title).unwrap();
        for section in &self.sections {
            writeln!(out).unwrap();
            writeln!(out, "{}", section.heading).unwrap();
            for (key, value) in &section.rows {
                writeln!(out, "  {key}: {value}").unwrap();
            }
        }
        out
    }

    /// Machine layout: one `section.key = value` line per row, rows
    /// sorted by key within each section.
    pub fn render_structured(&self) -> String {
        let mut out = String::new();
        writeln!(out, "report {}", slug(&self.title)).unwrap();
        for section in &self.sections {
            let prefix = slug(&section.heading);
            let mut rows = section.rows.clone();
            rows.sort();
            for (key, value) in rows {
                writeln!(out, "{prefix}.{} = {value}", slug(&key)).unwrap();
            }
        }
        out
    }

    pub fn render(&self, structured: bool) -> String {
        if structured {
            self.render_structured()
        } else {
            self.render_human()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("Demo Results");
        let mut s = ReportSection::new("First Part");
        s.row("b.key", 2).row("a.key", 1);
        r.push(s);
        let mut s = ReportSection::new("Second Part");
        s.row("ok", true);
        r.push(s);
        r
    }

    #[test]
    fn structured_rows_are_sorted_within_sections() {
        let text = sample().render_structured();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "report demo-results");
        assert_eq!(lines[1], "first-part.a.key = 1");
        assert_eq!(lines[2], "first-part.b.key = 2");
        assert_eq!(lines[3], "second-part.ok = true");
    }

    #[test]
    fn human_keeps_insertion_order() {
        let text = sample().render_human();
        let b_pos = text.find("b.key").unwrap();
        let a_pos = text.find("a.key").unwrap();
        assert!(b_pos < a_pos);
    }

    #[test]
    fn rendering_is_reproducible() {
        assert_eq!(sample().render(true), sample().render(true));
        assert_eq!(sample().render(false), sample().render(false));
    }
}
