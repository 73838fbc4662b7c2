use std::io::{self, Write};

use super::FingerprintError;

/// One line of the fingerprint dump: id, kind, nbits, hex bits, labels.
#[derive(Debug, Clone, PartialEq)]
pub struct FpRow {
    pub id: String,
    pub kind: String,
    pub nbits: usize,
    pub hex: String,
    pub labels: Vec<Option<f64>>,
}

/// Header line for a dump with the given task names.
pub fn header_line(task_names: &[String]) -> String {
    let mut cols = vec!["id", "kind", "nbits", "bits"];
    cols.extend(task_names.iter().map(String::as_str));
    cols.join("\t")
}

impl FpRow {
    /// Tab-separated; absent labels are empty fields.
    pub fn to_line(&self) -> String {
        let mut fields = vec![self.id.clone(), self.kind.clone(), self.nbits.to_string(), self.hex.clone()];
        fields.extend(self.labels.iter().map(|l| l.map(|v| v.to_string()).unwrap_or_default()));
        fields.join("\t")
    }

    pub fn parse(line: &str) -> Result<FpRow, FingerprintError> {
        let bad = || FingerprintError::BadDumpLine(line.to_string());
        let mut it = line.split('\t');
        let id = it.next().ok_or_else(bad)?.to_string();
        let kind = it.next().ok_or_else(bad)?.to_string();
        let nbits: usize = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let hex = it.next().ok_or_else(bad)?.to_string();
        if hex.len() * 4 != nbits {
            return Err(bad());
        }
        let labels = it
            .map(|f| if f.is_empty() { Ok(None) } else { f.parse().map(Some).map_err(|_| bad()) })
            .collect::<Result<_, _>>()?;
        Ok(FpRow {
            id,
            kind,
            nbits,
            hex,
            labels,
        })
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.to_line())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_roundtrip() {
        let row = FpRow {
            id: "m1#concat2".into(),
            kind: "ecfp".into(),
            nbits: 16,
            hex: "0182".into(),
            labels: vec![Some(1.0), None, Some(-0.25)],
        };
        let line = row.to_line();
        assert_eq!(line, "m1#concat2\tecfp\t16\t0182\t1\t\t-0.25");
        assert_eq!(FpRow::parse(&line).unwrap(), row);
        assert!(FpRow::parse("a\tecfp\t8\t0").is_err());
        assert_eq!(header_line(&["p_np".into()]), "id\tkind\tnbits\tbits\tp_np");
    }
}
