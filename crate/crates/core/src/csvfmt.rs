//! CSV assembly helpers shared by the export paths.
//!
//! All numeric artifacts are written with 17 significant digits so that a
//! round trip through text is lossless for `f64` and byte-identical across
//! runs.

/// Full-precision, locale-free float formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds a CSV document from a header line and rows of already-formatted
/// fields. Rows are joined with `,`, lines with `\n`, and the document ends
/// with a trailing newline.
pub fn build_csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for x in [0.1, -3.25e-17, std::f64::consts::PI, 1.0 / 3.0, 6.02e23] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{s}");
        }
    }

    #[test]
    fn csv_layout() {
        let doc = build_csv("a,b", vec![vec!["1".into(), "2".into()]]);
        assert_eq!(doc, "a,b\n1,2\n");
    }
}
