//! Text renderings: ratio formatting and the table / CSV / b-file writers.

use std::io::{self, Write};

use clap::ValueEnum;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Whitespace-aligned columns with a header.
    Table,
    /// Comma-separated with a header row.
    Csv,
    /// OEIS b-file: "index value" per line, no header.
    Bfile,
    /// Structured output (analyze only).
    Json,
}

/// `num/den` to `sig` significant digits, in the style of C's `%g`: trailing
/// zeros are dropped and exponent notation is used outside `1e-4 ..= 1e6`.
/// Rounding is exact, half away from zero.
pub fn format_ratio(num: &BigInt, den: &BigInt, sig: u32) -> String {
    assert!(sig >= 1, "at least one significant digit");
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return "0".into();
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let (num, den) = (num.abs(), den.abs());
    let ten = BigInt::from(10);

    // exponent e with 10^e <= num/den < 10^(e+1)
    let mut e: i64 = num.to_string().len() as i64 - den.to_string().len() as i64;
    let pow = |k: i64| ten.pow(k.unsigned_abs() as u32);
    let at_least = |e: i64| {
        if e >= 0 {
            num >= &den * pow(e)
        } else {
            &num * pow(e) >= den
        }
    };
    while !at_least(e) {
        e -= 1;
    }
    while at_least(e + 1) {
        e += 1;
    }

    // digits = round(num/den * 10^(sig-1-e))
    let shift = sig as i64 - 1 - e;
    let (n, d) = if shift >= 0 { (&num * pow(shift), den.clone()) } else { (num.clone(), &den * pow(shift)) };
    let (q, r) = n.div_rem(&d);
    let mut digits = if &r * 2 >= d { q + BigInt::one() } else { q };
    if digits >= pow(sig as i64) {
        digits /= &ten;
        e += 1;
    }
    let digits = digits.to_string();
    debug_assert_eq!(digits.len(), sig as usize);

    let body = if e < -4 || e >= sig as i64 {
        let mantissa = trim_fraction(&format!("{}.{}", &digits[..1], &digits[1..]));
        format!("{mantissa}e{}{:02}", if e < 0 { '-' } else { '+' }, e.abs())
    } else if e >= 0 {
        let split = e as usize + 1;
        trim_fraction(&format!("{}.{}", &digits[..split], &digits[split..]))
    } else {
        let zeros = "0".repeat((-e - 1) as usize);
        trim_fraction(&format!("0.{zeros}{digits}"))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Writes rows in one of the line formats. Cells are pre-rendered strings;
/// the b-file form keeps only the columns named in `bfile_columns`.
pub struct RowWriter<'a> {
    out: &'a mut dyn Write,
    format: Format,
    header: Vec<&'static str>,
    bfile_columns: (usize, usize),
    widths: Vec<usize>,
    started: bool,
}

impl<'a> RowWriter<'a> {
    pub fn new(out: &'a mut dyn Write, format: Format, header: Vec<&'static str>, bfile_columns: (usize, usize)) -> Self {
        let widths = header.iter().map(|h| h.len().max(6)).collect();
        RowWriter {
            out,
            format,
            header,
            bfile_columns,
            widths,
            started: false,
        }
    }

    fn start(&mut self) -> io::Result<()> {
        if self.started {
            return Ok(());
        }
        self.started = true;
        match self.format {
            Format::Table => {
                let line = self.pad(&self.header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
                writeln!(self.out, "{line}")
            }
            Format::Csv => writeln!(self.out, "{}", self.header.join(",")),
            Format::Bfile | Format::Json => Ok(()),
        }
    }

    fn pad(&self, cells: &[String]) -> String {
        cells
            .iter()
            .zip(&self.widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    }

    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        self.start()?;
        match self.format {
            Format::Table => {
                let line = self.pad(cells);
                writeln!(self.out, "{line}")
            }
            Format::Csv => writeln!(self.out, "{}", cells.join(",")),
            Format::Bfile | Format::Json => {
                let (i, v) = self.bfile_columns;
                writeln!(self.out, "{} {}", cells[i], cells[v])
            }
        }
    }

    /// Emits the header even when no rows followed.
    pub fn finish(mut self) -> io::Result<()> {
        self.start()?;
        self.out.flush()
    }
}

/// Parses b-file text back into `(index, value)` pairs, skipping `#`
/// comments and blank lines.
pub fn read_bfile(text: &str) -> Result<Vec<(BigInt, BigInt)>, String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut parts = l.split(' ');
            let (Some(i), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(format!("malformed b-file line: {l:?}"));
            };
            let parse = |s: &str| s.parse::<BigInt>().map_err(|e| format!("{s:?}: {e}"));
            Ok((parse(i)?, parse(v)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> String {
        format_ratio(&BigInt::from(n), &BigInt::from(d), 6)
    }

    #[test]
    fn table_ratios() {
        assert_eq!(r(19, 7), "2.71429");
        assert_eq!(r(7, 1), "7");
        assert_eq!(r(10, 4), "2.5");
        assert_eq!(r(21, 9), "2.33333");
        assert_eq!(r(201, 99), "2.0303");
        assert_eq!(r(202, 100), "2.02");
        assert_eq!(r(316, 106), "2.98113");
        assert_eq!(r(85, 37), "2.2973");
    }

    #[test]
    fn printf_g_edge_cases() {
        assert_eq!(r(1, 3), "0.333333");
        assert_eq!(r(1, 30_000), "3.33333e-05");
        assert_eq!(r(1, 10_000), "0.0001");
        assert_eq!(r(999_999, 1), "999999");
        assert_eq!(r(1_000_000, 1), "1e+06");
        assert_eq!(r(9_999_995, 10), "1e+06");
        assert_eq!(r(-5, 2), "-2.5");
        assert_eq!(r(0, 9), "0");
        assert_eq!(r(2, 3), "0.666667");
    }

    #[test]
    fn bfile_round_trip() {
        let mut buf = Vec::new();
        let mut w = RowWriter::new(&mut buf, Format::Bfile, vec!["n", "g"], (0, 1));
        w.row(&["2".into(), "1".into()]).unwrap();
        w.row(&["5".into(), "5".into()]).unwrap();
        w.finish().unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "2 1\n5 5\n");
        let parsed = read_bfile(&text).unwrap();
        assert_eq!(parsed, vec![(2.into(), 1.into()), (5.into(), 5.into())]);
        assert!(read_bfile("1  2").is_err());
    }

    #[test]
    fn empty_table_has_header() {
        let mut buf = Vec::new();
        RowWriter::new(&mut buf, Format::Csv, vec!["n", "g"], (0, 1)).finish().unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,g\n");
    }
}
