//! CSV and JSON encoding with matching decoders.
//!
//! JSON reals are written in scientific notation with 17 significant digits,
//! which is enough for every f64 to parse back to the same bits. CSV reals use
//! the shortest representation that round-trips.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::ser::Formatter;

use crate::bell::{BellReport, Picture};
use crate::dilation::{DilationResult, VerificationReport};
use crate::error::{Error, Result};
use crate::evolution::EvolutionComparison;
use crate::numerics::ComplexMatrix;
use crate::sampling::{BellEstimate, ClassicalSample, EstimatorResult, ShotTable};

pub const BELL_CSV_HEADER: &str =
    "alpha,e0,s,picture,b0a0,b1a0,b0a1,b1a1,bell_value,deviation_term,bound";
pub const ESTIMATOR_CSV_HEADER: &str = "mean,stderr,shots,seed,degenerate";
pub const DILATION_CSV_HEADER: &str = "matrix,row,col,re,im";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Contract(format!("unknown format '{other}'"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// Pretty JSON with every f64 rendered as `d.dddddddddddddddde±x`.
struct FullPrecision<'a>(serde_json::ser::PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident),* $(,)?) => {
        $(fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
            self.0.$name(w)
        })*
    };
}

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward!(
        begin_array,
        end_array,
        begin_object,
        end_object,
        end_object_value
    );

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
}

/// Reject non-finite reals up front; serde_json would quietly print `null`.
pub trait CheckFinite {
    fn check_finite(&self) -> Result<()>;
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Serialization(format!("{name} is not finite ({x})")))
    }
}

fn finite_matrix(name: &str, m: &ComplexMatrix) -> Result<()> {
    if m.is_finite() {
        Ok(())
    } else {
        Err(Error::Serialization(format!(
            "{name} has non-finite entries"
        )))
    }
}

fn finite_map(m: &BTreeMap<String, f64>) -> Result<()> {
    m.iter().try_for_each(|(k, &v)| finite(k, v))
}

impl<T: CheckFinite> CheckFinite for [T] {
    fn check_finite(&self) -> Result<()> {
        self.iter().try_for_each(CheckFinite::check_finite)
    }
}

impl<T: CheckFinite> CheckFinite for Vec<T> {
    fn check_finite(&self) -> Result<()> {
        self.as_slice().check_finite()
    }
}

impl CheckFinite for f64 {
    fn check_finite(&self) -> Result<()> {
        finite("value", *self)
    }
}

impl CheckFinite for BellReport {
    fn check_finite(&self) -> Result<()> {
        for (name, x) in [
            ("alpha", self.alpha),
            ("e0", self.e0),
            ("s", self.s),
            ("b0a0", self.b0a0),
            ("b1a0", self.b1a0),
            ("b0a1", self.b0a1),
            ("b1a1", self.b1a1),
            ("bell_value", self.bell_value),
            ("mean_term", self.mean_term),
            ("deviation_term", self.deviation_term),
            ("bound", self.bound),
        ] {
            finite(name, x)?;
        }
        Ok(())
    }
}

impl CheckFinite for DilationResult {
    fn check_finite(&self) -> Result<()> {
        if let Some(p) = &self.params {
            finite("e0", p.e0)?;
            finite("s", p.s)?;
            finite("alpha", p.alpha)?;
        }
        finite_matrix("H", &self.h)?;
        finite_matrix("T", &self.coupling)?;
        finite_matrix("Lambda", &self.lambda)?;
        finite_matrix("Omega", &self.omega)?;
        finite_matrix("Hhat", &self.hhat)?;
        finite_map(&self.residuals)
    }
}

impl CheckFinite for EstimatorResult {
    fn check_finite(&self) -> Result<()> {
        finite("mean", self.mean)?;
        finite("stderr", self.stderr)
    }
}

impl CheckFinite for VerificationReport {
    fn check_finite(&self) -> Result<()> {
        finite("tolerance", self.tolerance)?;
        finite_map(&self.residuals)
    }
}

impl CheckFinite for EvolutionComparison {
    fn check_finite(&self) -> Result<()> {
        finite("t", self.t)?;
        finite("deviation", self.deviation)?;
        finite("success_probability", self.success_probability)
    }
}

impl CheckFinite for ShotTable {
    fn check_finite(&self) -> Result<()> {
        self.a_values.check_finite()?;
        self.b_values.check_finite()
    }
}

impl CheckFinite for ClassicalSample {
    fn check_finite(&self) -> Result<()> {
        self.table.check_finite()?;
        self.bell.check_finite()
    }
}

impl CheckFinite for BellEstimate {
    fn check_finite(&self) -> Result<()> {
        self.terms.as_slice().check_finite()?;
        self.bell.check_finite()
    }
}

/// JSON text of any finite report.
pub fn to_json<T: Serialize + CheckFinite + ?Sized>(value: &T) -> Result<String> {
    value.check_finite()?;
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut buf,
        FullPrecision(serde_json::ser::PrettyFormatter::new()),
    );
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Serialization(e.to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

/// A report with a CSV form.
pub trait CsvReport: Sized {
    fn to_csv(&self) -> Result<String>;
    fn from_csv(text: &str) -> Result<Self>;
}

fn csv_lines<'a>(
    text: &'a str,
    header: &str,
) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => return Err(Error::Serialization(format!("unexpected CSV header '{h}'"))),
        None => return Err(Error::Serialization("empty CSV document".into())),
    }
    Ok(lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(k, l)| (k + 2, l.split(',').collect())))
}

fn parse_field<T: FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Serialization(format!("line {line}: cannot parse '{field}'")))
}

fn expect_fields(line: usize, fields: &[&str], n: usize) -> Result<()> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(Error::Serialization(format!(
            "line {line}: expected {n} fields, found {}",
            fields.len()
        )))
    }
}

pub fn bell_csv_row(r: &BellReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.alpha,
        r.e0,
        r.s,
        r.picture,
        r.b0a0,
        r.b1a0,
        r.b0a1,
        r.b1a1,
        r.bell_value,
        r.deviation_term,
        r.bound
    )
}

impl CsvReport for Vec<BellReport> {
    fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        let mut out = String::from(BELL_CSV_HEADER);
        out.push('\n');
        for r in self {
            out.push_str(&bell_csv_row(r));
            out.push('\n');
        }
        Ok(out)
    }

    fn from_csv(text: &str) -> Result<Self> {
        csv_lines(text, BELL_CSV_HEADER)?
            .map(|(line, f)| {
                expect_fields(line, &f, 11)?;
                let num = |k: usize| parse_field::<f64>(line, f[k]);
                let e0 = num(1)?;
                Ok(BellReport {
                    alpha: num(0)?,
                    e0,
                    s: num(2)?,
                    picture: f[3]
                        .parse::<Picture>()
                        .map_err(|e| Error::Serialization(e.to_string()))?,
                    b0a0: num(4)?,
                    b1a0: num(5)?,
                    b0a1: num(6)?,
                    b1a1: num(7)?,
                    bell_value: num(8)?,
                    mean_term: 2.0 * e0,
                    deviation_term: num(9)?,
                    bound: num(10)?,
                })
            })
            .collect()
    }
}

impl CsvReport for EstimatorResult {
    fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        Ok(format!(
            "{ESTIMATOR_CSV_HEADER}\n{},{},{},{},{}\n",
            self.mean, self.stderr, self.shots, self.seed, self.degenerate
        ))
    }

    fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<(usize, Vec<&str>)> = csv_lines(text, ESTIMATOR_CSV_HEADER)?.collect();
        let [(line, f)] = rows.as_slice() else {
            return Err(Error::Serialization(
                "expected exactly one estimator row".into(),
            ));
        };
        let line = *line;
        expect_fields(line, f, 5)?;
        Ok(EstimatorResult {
            mean: parse_field(line, f[0])?,
            stderr: parse_field(line, f[1])?,
            shots: parse_field(line, f[2])?,
            seed: parse_field(line, f[3])?,
            degenerate: parse_field(line, f[4])?,
        })
    }
}

const DILATION_MATRICES: [&str; 5] = ["H", "T", "Lambda", "Omega", "Hhat"];

fn dilation_matrices(d: &DilationResult) -> [&ComplexMatrix; 5] {
    [&d.h, &d.coupling, &d.lambda, &d.omega, &d.hhat]
}

/// Long-form matrix entries. Parameters and residuals only travel in JSON.
impl CsvReport for DilationResult {
    fn to_csv(&self) -> Result<String> {
        self.check_finite()?;
        let mut out = String::from(DILATION_CSV_HEADER);
        out.push('\n');
        for (name, m) in DILATION_MATRICES.iter().zip(dilation_matrices(self)) {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let z = m[(i, j)];
                    out.push_str(&format!("{name},{i},{j},{},{}\n", z.re, z.im));
                }
            }
        }
        Ok(out)
    }

    fn from_csv(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, Vec<(usize, usize, f64, f64)>> = BTreeMap::new();
        for (line, f) in csv_lines(text, DILATION_CSV_HEADER)? {
            expect_fields(line, &f, 5)?;
            let name = DILATION_MATRICES
                .iter()
                .find(|n| **n == f[0])
                .ok_or_else(|| {
                    Error::Serialization(format!("line {line}: unknown matrix '{}'", f[0]))
                })?;
            entries.entry(name).or_default().push((
                parse_field(line, f[1])?,
                parse_field(line, f[2])?,
                parse_field(line, f[3])?,
                parse_field(line, f[4])?,
            ));
        }
        let mut mats = Vec::with_capacity(5);
        for name in DILATION_MATRICES {
            let cells = entries
                .get(name)
                .ok_or_else(|| Error::Serialization(format!("matrix {name} missing")))?;
            let rows = cells.iter().map(|c| c.0).max().unwrap_or(0) + 1;
            let cols = cells.iter().map(|c| c.1).max().unwrap_or(0) + 1;
            if cells.len() != rows * cols {
                return Err(Error::Serialization(format!("matrix {name} is incomplete")));
            }
            let mut m = ComplexMatrix::zeros(rows, cols);
            for &(i, j, re, im) in cells {
                m[(i, j)] = crate::numerics::C64::new(re, im);
            }
            mats.push(m);
        }
        let mut it = mats.into_iter();
        let mut next = || it.next().expect("five matrices");
        Ok(DilationResult {
            params: None,
            h: next(),
            coupling: next(),
            lambda: next(),
            omega: next(),
            hhat: next(),
            residuals: BTreeMap::new(),
        })
    }
}

/// Encode in either format.
pub fn encode_report<T>(value: &T, format: Format) -> Result<String>
where
    T: CsvReport + Serialize + CheckFinite,
{
    match format {
        Format::Csv => value.to_csv(),
        Format::Json => to_json(value),
    }
}

pub fn decode_report<T>(text: &str, format: Format) -> Result<T>
where
    T: CsvReport + DeserializeOwned,
{
    match format {
        Format::Csv => T::from_csv(text),
        Format::Json => from_json(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::{bell_simulation, AliceSetting};
    use crate::numerics::{sigma_x, ComplexMatrix};
    use crate::pt_model::ModelParams;
    use std::f64::consts::FRAC_PI_6;

    fn example_report() -> BellReport {
        let d =
            DilationResult::from_model(&ModelParams::new(0.0, 1.0, FRAC_PI_6).unwrap()).unwrap();
        bell_simulation(&d, &AliceSetting::balanced()).unwrap()
    }

    #[test]
    fn bell_csv_row_matches_worked_example() {
        let csv = vec![example_report()].to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(BELL_CSV_HEADER));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        let want = "0.52359878,0,1,simulation,0.75,0.75,-0.75,-0.75,1.5,1.5,1.5";
        for (got, want) in fields.iter().zip(want.split(',')) {
            match want.parse::<f64>() {
                Ok(w) => assert!(
                    (got.parse::<f64>().unwrap() - w).abs() < 1e-8,
                    "{got} vs {want}"
                ),
                Err(_) => assert_eq!(*got, want),
            }
        }
        assert_eq!(fields.len(), 11);
    }

    #[test]
    fn bell_roundtrips_both_formats() {
        let rows = vec![example_report(), example_report()];
        for fmt in [Format::Csv, Format::Json] {
            let text = encode_report(&rows, fmt).unwrap();
            let back: Vec<BellReport> = decode_report(&text, fmt).unwrap();
            assert_eq!(back, rows);
        }
    }

    #[test]
    fn json_reals_have_seventeen_digits() {
        let json = to_json(&example_report()).unwrap();
        let line = json.lines().find(|l| l.contains("\"b0a0\"")).unwrap();
        let num = line.split(": ").nth(1).unwrap().trim_end_matches(',');
        let (mantissa, _) = num.trim_start_matches('-').split_once('e').unwrap();
        assert_eq!(mantissa.replace('.', "").len(), 17, "{num}");
        assert!((num.parse::<f64>().unwrap() - 0.75).abs() < 1e-12);
        assert!(json.contains("\"picture\": \"simulation\""));
    }

    #[test]
    fn hermitian_dilation_json_is_block_diagonal() {
        let d = DilationResult::from_model(&ModelParams::new(0.0, 1.0, 0.0).unwrap()).unwrap();
        let json = to_json(&d).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let want = ComplexMatrix::identity(2).kron(&sigma_x());
        let rows = v["Hhat"].as_array().unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (j, z) in row.as_array().unwrap().iter().enumerate() {
                assert_eq!(z[0].as_f64().unwrap(), want[(i, j)].re);
                assert_eq!(z[1].as_f64().unwrap(), want[(i, j)].im);
            }
        }
        let back: DilationResult = from_json(&json).unwrap();
        assert_eq!(back, d);
        let csv_back = DilationResult::from_csv(&d.to_csv().unwrap()).unwrap();
        assert_eq!(csv_back.hhat, d.hhat);
        assert_eq!(csv_back.coupling, d.coupling);
    }

    #[test]
    fn nan_is_a_serialization_error() {
        let mut r = example_report();
        r.bound = f64::NAN;
        assert!(matches!(to_json(&r), Err(Error::Serialization(_))));
        assert!(matches!(vec![r].to_csv(), Err(Error::Serialization(_))));
        let e = EstimatorResult {
            mean: f64::INFINITY,
            stderr: 0.0,
            shots: 1,
            seed: 0,
            degenerate: true,
        };
        assert!(encode_report(&e, Format::Json).is_err());
    }

    #[test]
    fn estimator_roundtrip() {
        let e = EstimatorResult {
            mean: 0.1 + 0.2,
            stderr: 1.0 / 3.0,
            shots: 10,
            seed: u64::MAX,
            degenerate: false,
        };
        for fmt in [Format::Csv, Format::Json] {
            let back: EstimatorResult =
                decode_report(&encode_report(&e, fmt).unwrap(), fmt).unwrap();
            assert_eq!(back, e);
        }
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(Vec::<BellReport>::from_csv("alpha,e0\n").is_err());
        let bad = format!("{BELL_CSV_HEADER}\n1,2,3\n");
        assert!(Vec::<BellReport>::from_csv(&bad).is_err());
        assert!(from_json::<BellReport>("{").is_err());
        assert!("xml".parse::<Format>().is_err());
    }
}
