//! Plain-text certificate record: `[section]` headers followed by
//! `key = value` lines. Numeric bounds are stored as hex floats with a
//! decimal rendering after `#`, so the record can be read back exactly.

use std::fmt::Write as _;

use diskcert_core::ball::{hexf, parse_f64};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    pub sections: Vec<(String, Vec<(String, String)>)>,
}

pub const HEADER: &str = "diskcert certificate v1";

impl Record {
    pub fn section(&mut self, name: &str) -> &mut Vec<(String, String)> {
        if let Some(i) = self.sections.iter().position(|(n, _)| n == name) {
            &mut self.sections[i].1
        } else {
            self.sections.push((name.to_string(), Vec::new()));
            &mut self.sections.last_mut().unwrap().1
        }
    }

    pub fn put(&mut self, section: &str, key: &str, value: impl Into<String>) {
        let value = value.into();
        let s = self.section(section);
        match s.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => s.push((key.to_string(), value)),
        }
    }

    /// Stores a bound bit-exactly with a readable decimal comment.
    pub fn put_f64(&mut self, section: &str, key: &str, v: f64) {
        self.put(section, key, format!("{} # {v:e}", hexf(v)));
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let (_, s) = self.sections.iter().find(|(n, _)| n == section)?;
        s.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Option<f64> {
        let v = self.get(section, key)?;
        parse_f64(v.split('#').next()?.trim())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for (name, kv) in &self.sections {
            let _ = writeln!(out, "\n[{name}]");
            for (k, v) in kv {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Record, String> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == HEADER => {}
            _ => return Err(format!("not a certificate (expected `{HEADER}`)")),
        }
        let mut rec = Record::default();
        let mut current: Option<String> = None;
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                rec.section(name);
                current = Some(name.to_string());
                continue;
            }
            let sec = current.as_deref().ok_or_else(|| format!("line {}: entry before any section", i + 1))?;
            let (k, v) = line.split_once(" = ").ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            rec.put(sec, k.trim(), v.trim());
        }
        Ok(rec)
    }
}
