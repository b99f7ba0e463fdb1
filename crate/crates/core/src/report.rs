//! JSON and CSV output shapes.
//!
//! Exact integers are written as decimal strings in JSON so 64-bit consumers
//! never truncate them. Reals are written with 17 significant digits.

use std::io::{self, Write};

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::analysis::{EnvelopeReport, FitReport};
use crate::sieve::ArithmeticKind;
use crate::summatory::SummatoryValue;

/// `v` formatted with 17 significant digits, e.g. `1.0132118364233778e-1`.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn real17<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !v.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(fmt17(*v)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn as_decimal<S: Serializer>(v: &i128, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One summatory result as emitted by the `sum` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummatoryRecord {
    pub x: u64,
    pub function: String,
    pub method: &'static str,
    #[serde(serialize_with = "as_decimal")]
    pub value: i128,
    /// Wall time; omitted in deterministic output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl SummatoryRecord {
    pub fn new(v: &SummatoryValue, elapsed_ms: Option<f64>) -> Self {
        Self {
            x: v.x,
            function: selector(v.function),
            method: v.method.name(),
            value: v.value,
            elapsed_ms,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    pub fn write_csv<W: Write + ?Sized>(
        records: &[SummatoryRecord],
        out: &mut W,
    ) -> io::Result<()> {
        let timed = records.iter().any(|r| r.elapsed_ms.is_some());
        if timed {
            writeln!(out, "x,function,method,value,elapsed_ms")?;
        } else {
            writeln!(out, "x,function,method,value")?;
        }
        for r in records {
            write!(out, "{},{},{},{}", r.x, r.function, r.method, r.value)?;
            if timed {
                write!(out, ",{}", r.elapsed_ms.unwrap_or(0.0))?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn selector(kind: ArithmeticKind) -> String {
    kind.to_string()
}

impl EnvelopeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// `x,exact,main,normalizer,ratio`, one row per accepted sample.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "x,exact,main,normalizer,ratio")?;
        for s in &self.samples {
            writeln!(
                out,
                "{},{},{},{},{}",
                s.x,
                s.exact,
                fmt17(s.main),
                fmt17(s.normalizer),
                fmt17(s.ratio)
            )?;
        }
        Ok(())
    }
}

impl FitReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// `x,residual`, one row per fitted sample.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "x,residual")?;
        for r in &self.residuals {
            writeln!(out, "{},{}", r.x, fmt17(r.residual))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{envelope, Claim};
    use crate::summatory::mean_square_summatory;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.101_321_183_642_337_77), "1.0132118364233778e-1");
        assert_eq!(fmt17(0.0), "0.0000000000000000e0");
        for v in [1.0 / 3.0, 12345.678, -2.5e-300] {
            assert_eq!(fmt17(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn summatory_record_json() {
        let v = mean_square_summatory(10).unwrap();
        assert_eq!(
            SummatoryRecord::new(&v, None).to_json(),
            r#"{"x":10,"function":"d2","method":"mobius_weighted","value":"83"}"#
        );
        let timed = SummatoryRecord::new(&v, Some(1.5)).to_json();
        assert!(
            timed.ends_with(r#""value":"83","elapsed_ms":1.5}"#),
            "{timed}"
        );
    }

    #[test]
    fn envelope_json_shape() {
        let r = envelope(Claim::MeanSquare, &[10, 100]).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["claim"], "s");
        assert_eq!(json["samples"][0]["exact"], "83");
        assert!(json["samples"][0]["ratio"].is_f64());
        assert!(r.to_json().contains("\"main\":1.2369362598174"));
        let mut csv = Vec::new();
        r.write_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("x,exact,main,normalizer,ratio\n10,83,1.2369362598"));
        assert_eq!(csv.lines().count(), 3);
    }
}
