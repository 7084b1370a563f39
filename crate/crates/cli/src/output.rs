//! CSV assembly with pinned formatting: 17 significant digits, `.` decimal
//! separator, `\n` line endings, `#`-prefixed comment rows. Identical
//! flags must produce byte-identical files.

use std::io::{self, Write};

/// Format one value with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_optional(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// A fully formatted CSV artifact: leading comments, header, data rows,
/// trailing comment rows with derived quantities.
#[derive(Debug, Clone, Default)]
pub struct CsvDocument {
    pub comments: Vec<String>,
    pub header: String,
    pub rows: Vec<String>,
    pub footers: Vec<String>,
}

impl CsvDocument {
    pub fn write_to(&self, out: &mut dyn Write) -> io::Result<()> {
        for line in &self.comments {
            out.write_all(b"# ")?;
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
        out.write_all(self.header.as_bytes())?;
        out.write_all(b"\n")?;
        for row in &self.rows {
            out.write_all(row.as_bytes())?;
            out.write_all(b"\n")?;
        }
        for line in &self.footers {
            out.write_all(b"# ")?;
            out.write_all(line.as_bytes())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buffer = Vec::new();
        self.write_to(&mut buffer).expect("writing to a Vec cannot fail");
        buffer
    }
}

/// Companion gnuplot script for a sweep CSV: one curve of M against sigma
/// per state label.
pub fn sweep_gnuplot_script(csv_name: &str, labels: &[String]) -> String {
    let mut script = String::new();
    script.push_str("# companion plot script; run: gnuplot -persist <this file>\n");
    script.push_str("set datafile separator ','\n");
    script.push_str("set logscale x\n");
    script.push_str("set xlabel 'sigma'\n");
    script.push_str("set ylabel 'M'\n");
    script.push_str("set key outside\n");
    script.push_str("plot \\\n");
    let curves: Vec<String> = labels
        .iter()
        .map(|label| {
            format!(
                "  '{csv_name}' using 2:(strcol(1) eq '{label}' ? column(4) : 1/0) \
                 with linespoints title '{label}'"
            )
        })
        .collect();
    script.push_str(&curves.join(", \\\n"));
    script.push('\n');
    script
}

/// Companion gnuplot script for a bounds-comparison CSV.
pub fn bounds_gnuplot_script(csv_name: &str) -> String {
    format!(
        "# companion plot script; run: gnuplot -persist <this file>\n\
         set datafile separator ','\n\
         set logscale x\n\
         set xlabel 'sigma'\n\
         set key outside\n\
         plot '{csv_name}' using 1:2 with lines title 'sqrt(F)', \\\n\
         \x20 '{csv_name}' using 1:3 with lines title 'B_W', \\\n\
         \x20 '{csv_name}' using 1:4 with lines title 'B_F'\n"
    )
}
