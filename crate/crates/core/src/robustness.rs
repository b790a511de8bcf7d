//! Sensitivity of complexity measures to single-bit flips.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::complexity::{longest_run, run_complexity, ComplexityEngine};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Nondeterministic automatic complexity.
    An,
    /// Run complexity.
    Run,
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "an" | "a_n" => Ok(Measure::An),
            "run" => Ok(Measure::Run),
            other => Err(Error::InvalidInput(format!(
                "unknown measure `{other}` (expected an or run)"
            ))),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::An => "an",
            Measure::Run => "run",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub position: usize,
    pub string: BitString,
    /// Set when the measure is A_N.
    pub complexity: Option<usize>,
    pub deficiency: Option<usize>,
    pub longest_run: usize,
    pub run_complexity: usize,
}

impl Perturbation {
    pub fn value(&self, measure: Measure) -> usize {
        match measure {
            Measure::An => self.complexity.expect("A_N sweep fills complexity"),
            Measure::Run => self.run_complexity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub base: BitString,
    pub measure: Measure,
    pub base_value: usize,
    /// One entry per position, in position order.
    pub entries: Vec<Perturbation>,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
}

impl PerturbationReport {
    pub const CSV_HEADER: &'static str =
        "position,string,complexity,deficiency,longest_run,run_complexity";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.position,
                e.string,
                opt(e.complexity),
                opt(e.deficiency),
                e.longest_run,
                e.run_complexity
            ));
        }
        out
    }
}

/// Renders `0^a 1 0^b`-style run-length patterns, as used in tables.
pub fn run_length_pattern(x: &BitString) -> String {
    let mut parts = Vec::new();
    let bits = x.bits();
    let mut i = 0;
    while i < bits.len() {
        let j = bits[i..].iter().take_while(|&&b| b == bits[i]).count() + i;
        let len = j - i;
        parts.push(if len == 1 {
            bits[i].to_string()
        } else {
            format!("{}^{len}", bits[i])
        });
        i = j;
    }
    parts.join(" ")
}

/// Evaluates `measure` on every string at Hamming distance 1 from `x`.
/// Only radius 1 is supported.
pub fn hamming_sweep(
    engine: &ComplexityEngine,
    x: &BitString,
    measure: Measure,
    radius: usize,
) -> Result<PerturbationReport> {
    if radius != 1 {
        return Err(Error::Precondition(format!(
            "only radius 1 is supported, got {radius}"
        )));
    }
    if x.is_empty() {
        return Err(Error::Precondition(
            "cannot perturb the empty string".to_string(),
        ));
    }
    let evaluate = |s: &BitString, position: usize| -> Result<Perturbation> {
        let (complexity, deficiency) = match measure {
            Measure::An => {
                let d = engine.deficiency(s)?;
                (Some(d.b_n - d.deficiency), Some(d.deficiency))
            }
            Measure::Run => (None, None),
        };
        Ok(Perturbation {
            position,
            string: s.clone(),
            complexity,
            deficiency,
            longest_run: longest_run(s, None),
            run_complexity: run_complexity(s)?,
        })
    };
    let base_value = evaluate(x, 0)?.value(measure);
    let entries = (0..x.len())
        .map(|i| evaluate(&x.flipped(i), i))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<usize> = entries.iter().map(|e| e.value(measure)).collect();
    Ok(PerturbationReport {
        base: x.clone(),
        measure,
        base_value,
        min: *values.iter().min().expect("nonempty"),
        max: *values.iter().max().expect("nonempty"),
        mean: values.iter().sum::<usize>() as f64 / values.len() as f64,
        entries,
    })
}

/// Checks `r_x <= 2 r_y + 1` for strings at Hamming distance exactly 1,
/// where `r` is the longest run of either symbol.
pub fn run_perturbation_bound_check(x: &BitString, y: &BitString) -> Result<bool> {
    match x.hamming_distance(y) {
        Some(1) => Ok(longest_run(x, None) <= 2 * longest_run(y, None) + 1),
        Some(d) => Err(Error::Precondition(format!(
            "strings are at Hamming distance {d}, not 1"
        ))),
        None => Err(Error::Precondition(
            "strings have different lengths".to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn run_sweep_of_zeros() {
        let engine = ComplexityEngine::default();
        let n = 9;
        let report = hamming_sweep(&engine, &BitString::repeat(0, n), Measure::Run, 1).unwrap();
        assert_eq!(report.entries.len(), n);
        for (a, e) in report.entries.iter().enumerate() {
            assert_eq!(e.position, a);
            assert_eq!(e.longest_run, a.max(n - a - 1));
            assert!(e.complexity.is_none());
        }
        assert_eq!(report.base_value, 1);
    }

    #[test]
    fn sweep_preconditions() {
        let engine = ComplexityEngine::default();
        assert!(hamming_sweep(&engine, &BitString::new(), Measure::Run, 1).is_err());
        assert!(hamming_sweep(&engine, &bs("01"), Measure::Run, 2).is_err());
        let long = BitString::repeat(0, 40);
        assert!(hamming_sweep(&engine, &long, Measure::An, 1)
            .unwrap_err()
            .is_limit());
    }

    #[test]
    fn two_rows_for_two_bits() {
        let engine = ComplexityEngine::default();
        let report = hamming_sweep(&engine, &bs("01"), Measure::An, 1).unwrap();
        assert_eq!(report.entries.len(), 2);
        assert_eq!(report.entries[0].string, bs("11"));
        assert_eq!(report.entries[0].deficiency, Some(1));
        assert_eq!(report.entries[1].string, bs("00"));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(csv.lines().nth(1).unwrap(), "0,11,1,1,2,1");
    }

    #[test]
    fn bound_check() {
        assert!(run_perturbation_bound_check(&bs("00000000"), &bs("00001000")).unwrap());
        assert!(run_perturbation_bound_check(&bs("01"), &bs("11")).unwrap());
        assert!(run_perturbation_bound_check(&bs("01"), &bs("10")).is_err());
        assert!(run_perturbation_bound_check(&bs("01"), &bs("011")).is_err());
        assert!(run_perturbation_bound_check(&bs("01"), &bs("01")).is_err());
    }

    #[test]
    fn patterns() {
        assert_eq!(run_length_pattern(&bs("000000100")), "0^6 1 0^2");
        assert_eq!(run_length_pattern(&bs("0")), "0");
        assert_eq!(run_length_pattern(&BitString::new()), "");
    }

    #[test]
    fn measure_names() {
        assert_eq!("AN".parse::<Measure>().unwrap(), Measure::An);
        assert_eq!("run".parse::<Measure>().unwrap(), Measure::Run);
        assert!("kolmogorov".parse::<Measure>().is_err());
    }
}
