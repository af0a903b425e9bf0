//! CSV rendering. Every file starts with a provenance comment and a header
//! row with units; numbers carry 17 significant digits so they round-trip.

use std::fmt::Write as _;

/// `# fhlevy <command> config_hash=<sha256> seed=<seed>`
pub fn provenance(command: &str, config_hash: &str, seed: u64) -> String {
    format!("# fhlevy {command} config_hash={config_hash} seed={seed}")
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(provenance: &str, columns: &[&str]) -> Self {
        let mut text = String::new();
        writeln!(text, "{provenance}").unwrap();
        writeln!(text, "{}", columns.join(",")).unwrap();
        Csv { text }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(f.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Data rows of a CSV produced by [`Csv`], split into fields.
pub fn parse_rows(text: &str) -> Vec<Vec<&str>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect()
}
