//! Plain-text persistence of the memo tables.
//!
//! ```text
//! wkcache v1
//! psi 2 3,2 29/5760
//! kap 0 2 0,0,0,0,0 5/1
//! ```
//! An empty exponent list is written as `-`.

use std::fmt::Write as _;
use std::path::Path;

use super::{IntersectionError, IntersectionTable, KappaPsiIndex, PsiIndex};
use crate::exactmath::{fmt_rational_pq, parse_rational};

pub const CACHE_HEADER: &str = "wkcache v1";

fn fmt_exps(e: &[u32]) -> String {
    if e.is_empty() {
        "-".to_string()
    } else {
        e.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
    }
}

fn parse_exps(s: &str) -> Result<Vec<u32>, String> {
    if s == "-" {
        return Ok(Vec::new());
    }
    s.split(',').map(|d| d.parse::<u32>().map_err(|_| format!("bad exponent {d:?}"))).collect()
}

impl IntersectionTable {
    pub fn to_cache_string(&self) -> String {
        let (psi, kap) = self.snapshot();
        let mut out = String::from(CACHE_HEADER);
        out.push('\n');
        for (k, v) in psi {
            let _ = writeln!(out, "psi {} {} {}", k.genus, fmt_exps(&k.exponents), fmt_rational_pq(&v));
        }
        for (k, v) in kap {
            let _ =
                writeln!(out, "kap {} {} {} {}", k.genus, k.kappa_power, fmt_exps(&k.exponents), fmt_rational_pq(&v));
        }
        out
    }

    /// Merges entries from cache text. An empty input is an empty table.
    pub fn load_str(&self, text: &str) -> Result<usize, IntersectionError> {
        let mut lines = text.lines().enumerate();
        let Some((_, header)) = lines.find(|(_, l)| !l.trim().is_empty()) else {
            return Ok(0);
        };
        if header.trim() != CACHE_HEADER {
            return Err(IntersectionError::Version(header.trim().to_string()));
        }
        let mut psi = Vec::new();
        let mut kap = Vec::new();
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| IntersectionError::Malformed { line: i + 1, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            match f.as_slice() {
                ["psi", g, e, v] => {
                    let g = g.parse::<u32>().map_err(|_| bad(format!("bad genus {g:?}")))?;
                    let e = parse_exps(e).map_err(bad)?;
                    let v = parse_rational(v).map_err(|e| bad(e.to_string()))?;
                    psi.push((PsiIndex::new(g, &e), v));
                }
                ["kap", g, m, e, v] => {
                    let g = g.parse::<u32>().map_err(|_| bad(format!("bad genus {g:?}")))?;
                    let m = m.parse::<u32>().map_err(|_| bad(format!("bad kappa power {m:?}")))?;
                    let e = parse_exps(e).map_err(bad)?;
                    let v = parse_rational(v).map_err(|e| bad(e.to_string()))?;
                    kap.push((KappaPsiIndex::new(g, &e, m), v));
                }
                _ => return Err(bad(format!("unrecognized record {line:?}"))),
            }
        }
        let count = psi.len() + kap.len();
        for (k, v) in psi {
            self.insert_psi(k, v);
        }
        for (k, v) in kap {
            self.insert_kappa(k, v);
        }
        Ok(count)
    }

    pub fn load(&self, path: &Path) -> Result<usize, IntersectionError> {
        let text = std::fs::read_to_string(path)?;
        self.load_str(&text)
    }

    pub fn store(&self, path: &Path) -> Result<(), IntersectionError> {
        std::fs::write(path, self.to_cache_string())?;
        self.mark_clean();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    #[test]
    fn round_trip() {
        let t = IntersectionTable::new();
        t.kappa_psi(0, &[0; 6], 3).unwrap();
        t.psi(2, &[2, 3]).unwrap();
        let text = t.to_cache_string();
        let u = IntersectionTable::new();
        u.load_str(&text).unwrap();
        assert_eq!(u.to_cache_string(), text);
        assert_eq!(u.stats(), t.stats());
    }

    #[test]
    fn empty_and_errors() {
        let t = IntersectionTable::new();
        assert_eq!(t.load_str("").unwrap(), 0);
        assert!(matches!(t.load_str("wkcache v2\n"), Err(IntersectionError::Version(_))));
        let err = t.load_str("wkcache v1\npsi 2 3,2 29/5760\npsi x 1 1/2\n").unwrap_err();
        assert!(matches!(err, IntersectionError::Malformed { line: 3, .. }), "{err}");
        assert_eq!(t.stats().psi_entries, 0);
    }

    #[test]
    fn loaded_values_are_served() {
        let t = IntersectionTable::new();
        t.load_str("wkcache v1\npsi 2 4 1/1152\n").unwrap();
        assert_eq!(t.psi(2, &[4]).unwrap(), rat(1, 1152));
    }
}
