//! Input sequences (built-in generators and files) and trace serialization.
//! Indexing is 1-based throughout. Every term is a pure function of the
//! source and the index, and finite sources error on out-of-range requests
//! instead of truncating silently.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::constructor::{ConstructionTrace, TraceStep};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Source {
    /// Finite, from `list:` or a file.
    Finite(Vec<BigInt>),
    Squares,
    Cubes,
    Primes,
    Arith { start: BigInt, step: BigInt },
    /// b_{k+1} = ratio * b_k + offset; plain `geom:` has offset 0.
    AffineGeom { start: BigInt, ratio: BigInt, offset: BigInt },
}

/// A deterministic, lazily evaluated integer sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSequence {
    source: Source,
    spec: String,
}

fn parse_int(tok: &str) -> Result<BigInt> {
    tok.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("`{}` is not an integer", tok.trim())))
}

fn parse_params(spec: &str, scheme: &str, rest: &str, want: usize) -> Result<Vec<BigInt>> {
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != want {
        return Err(Error::Parse(format!(
            "`{spec}`: {scheme} takes {want} comma-separated integers"
        )));
    }
    parts.iter().map(|p| parse_int(p)).collect()
}

impl IntSequence {
    /// Parses a sequence spec: `file:<path>`, `squares`, `cubes`, `primes`,
    /// `arith:<a0>,<d>`, `geom:<a0>,<ratio>`,
    /// `affine-geom:<a0>,<ratio>,<offset>`, or `list:<csv>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec_owned = spec.to_string();
        let source = match spec.split_once(':') {
            None => match spec {
                "squares" => Source::Squares,
                "cubes" => Source::Cubes,
                "primes" => Source::Primes,
                other => return Err(Error::Parse(format!("unknown sequence spec `{other}`"))),
            },
            Some(("list", rest)) => {
                if rest.trim().is_empty() {
                    return Err(Error::Parse("list: needs at least one integer".into()));
                }
                Source::Finite(rest.split(',').map(parse_int).collect::<Result<Vec<_>>>()?)
            }
            Some(("file", path)) => Source::Finite(read_sequence_file(Path::new(path))?),
            Some(("arith", rest)) => {
                let p = parse_params(spec, "arith", rest, 2)?;
                Source::Arith { start: p[0].clone(), step: p[1].clone() }
            }
            Some(("geom", rest)) => {
                let p = parse_params(spec, "geom", rest, 2)?;
                Source::AffineGeom {
                    start: p[0].clone(),
                    ratio: p[1].clone(),
                    offset: BigInt::zero(),
                }
            }
            Some(("affine-geom", rest)) => {
                let p = parse_params(spec, "affine-geom", rest, 3)?;
                Source::AffineGeom {
                    start: p[0].clone(),
                    ratio: p[1].clone(),
                    offset: p[2].clone(),
                }
            }
            Some((scheme, _)) => {
                return Err(Error::Parse(format!("unknown sequence scheme `{scheme}`")))
            }
        };
        Ok(IntSequence { source, spec: spec_owned })
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    /// Length for finite sources, `None` for generators.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match &self.source {
            Source::Finite(v) => Some(v.len()),
            _ => None,
        }
    }

    /// The first `count` terms, `b_1 ..= b_count`.
    pub fn prefix(&self, count: usize) -> Result<Vec<BigInt>> {
        match &self.source {
            Source::Finite(v) => {
                if count > v.len() {
                    return Err(Error::SequenceExhausted { len: v.len(), requested: count });
                }
                Ok(v[..count].to_vec())
            }
            Source::Squares => Ok((1..=count).map(|k| BigInt::from(k) * k).collect()),
            Source::Cubes => Ok((1..=count).map(|k| BigInt::from(k) * k * k).collect()),
            Source::Primes => Ok(primes(count)),
            Source::Arith { start, step } => {
                let mut out = Vec::with_capacity(count);
                let mut v = start.clone();
                for _ in 0..count {
                    out.push(v.clone());
                    v += step;
                }
                Ok(out)
            }
            Source::AffineGeom { start, ratio, offset } => {
                let mut out = Vec::with_capacity(count);
                let mut v = start.clone();
                for _ in 0..count {
                    out.push(v.clone());
                    v = &v * ratio + offset;
                }
                Ok(out)
            }
        }
    }

    /// The k-th term, 1-based.
    pub fn term(&self, k: usize) -> Result<BigInt> {
        if k == 0 {
            return Err(Error::InvalidParameter("sequence indices are 1-based".into()));
        }
        Ok(self.prefix(k)?.pop().expect("prefix(k) has k terms"))
    }
}

/// First `count` primes by incremental trial division against the primes
/// found so far. Plenty for prefixes in the 10^4 range.
fn primes(count: usize) -> Vec<BigInt> {
    let mut found: Vec<u64> = Vec::with_capacity(count);
    let mut candidate: u64 = 2;
    while found.len() < count {
        if found.iter().take_while(|&&p| p * p <= candidate).all(|&p| !candidate.is_multiple_of(p)) {
            found.push(candidate);
        }
        candidate += if candidate == 2 { 1 } else { 2 };
    }
    found.into_iter().map(BigInt::from).collect()
}

/// Reads one decimal integer per line; blank lines and `#` comments are
/// skipped.
fn read_sequence_file(path: &Path) -> Result<Vec<BigInt>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse::<BigInt>().map_err(|_| {
            Error::Parse(format!("{}:{}: `{line}` is not an integer", path.display(), lineno + 1))
        })?);
    }
    Ok(out)
}

/// Serializes a trace as a JSON array of step objects, big integers as
/// decimal strings. Output is byte-stable across runs.
pub fn trace_to_json(trace: &ConstructionTrace, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(&trace.steps).expect("trace serialization cannot fail")
    } else {
        serde_json::to_string(&trace.steps).expect("trace serialization cannot fail")
    }
}

/// Parses the JSON form back; `parse(emit(trace)) == trace`.
pub fn trace_from_json(text: &str) -> Result<ConstructionTrace> {
    let steps: Vec<TraceStep> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("trace JSON: {e}")))?;
    Ok(ConstructionTrace { steps })
}

/// CSV form: header `k,b_k,a_k,deviation,step_bound,candidates`, one row per
/// step.
pub fn trace_to_csv(trace: &ConstructionTrace) -> String {
    let mut out = String::from("k,b_k,a_k,deviation,step_bound,candidates\n");
    for s in &trace.steps {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.k, s.b_k, s.a_k, s.deviation, s.step_bound, s.candidates
        ));
    }
    out
}

/// Writes a rendered trace to a file or, for `-`, to stdout.
pub fn write_output(destination: &str, content: &str) -> Result<()> {
    if destination == "-" {
        std::io::stdout().write_all(content.as_bytes())?;
        Ok(())
    } else {
        fs::write(destination, content).map_err(|e| Error::Io(format!("{destination}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn bigs(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn builtin_generators() {
        assert_eq!(IntSequence::parse("squares").unwrap().prefix(5).unwrap(), bigs(&[1, 4, 9, 16, 25]));
        assert_eq!(IntSequence::parse("cubes").unwrap().prefix(4).unwrap(), bigs(&[1, 8, 27, 64]));
        assert_eq!(IntSequence::parse("primes").unwrap().prefix(6).unwrap(), bigs(&[2, 3, 5, 7, 11, 13]));
        assert_eq!(IntSequence::parse("geom:2,5").unwrap().prefix(4).unwrap(), bigs(&[2, 10, 50, 250]));
        assert_eq!(IntSequence::parse("arith:3,-2").unwrap().prefix(4).unwrap(), bigs(&[3, 1, -1, -3]));
        assert_eq!(
            IntSequence::parse("affine-geom:2,5,6").unwrap().prefix(4).unwrap(),
            bigs(&[2, 16, 86, 436])
        );
    }

    #[test]
    fn finite_sources_error_past_the_end() {
        let s = IntSequence::parse("list:1,4,9").unwrap();
        assert_eq!(s.term(3).unwrap(), big(9));
        assert!(matches!(
            s.term(4),
            Err(Error::SequenceExhausted { len: 3, requested: 4 })
        ));
        assert!(matches!(s.prefix(4), Err(Error::SequenceExhausted { .. })));
    }

    #[test]
    fn rejects_malformed_specs() {
        assert!(IntSequence::parse("fib").is_err());
        assert!(IntSequence::parse("geom:2").is_err());
        assert!(IntSequence::parse("list:1,x").is_err());
        assert!(IntSequence::parse("list:").is_err());
        assert!(IntSequence::parse("file:/no/such/file").is_err());
    }

    #[test]
    fn file_source_skips_comments() {
        let dir = std::env::temp_dir().join("phi_sidon_seq_test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("seq.txt");
        fs::write(&path, "# header\n1\n\n  4\n9\n").unwrap();
        let s = IntSequence::parse(&format!("file:{}", path.display())).unwrap();
        assert_eq!(s.prefix(3).unwrap(), bigs(&[1, 4, 9]));
        assert_eq!(s.len(), Some(3));
    }

    #[test]
    fn generators_match_closed_forms() {
        let n = 10_000usize;
        let sq = IntSequence::parse("squares").unwrap().prefix(n).unwrap();
        let cu = IntSequence::parse("cubes").unwrap().prefix(n).unwrap();
        for k in 1..=n {
            let kb = BigInt::from(k);
            assert_eq!(sq[k - 1], &kb * &kb);
            assert_eq!(cu[k - 1], &kb * &kb * &kb);
        }
        // Closed form for the affine recurrence with ratio 5, offset 6:
        // b_k = (b_1 + 3/2) 5^(k-1) - 3/2.
        let aff = IntSequence::parse("affine-geom:2,5,6").unwrap().prefix(20).unwrap();
        for k in 1..=20usize {
            let expect = (big(7) * big(5).pow((k - 1) as u32) - 3) / 2;
            assert_eq!(aff[k - 1], expect, "k={k}");
        }
        let pr = IntSequence::parse("primes").unwrap().prefix(n).unwrap();
        assert_eq!(pr[n - 1], big(104_729)); // the 10^4-th prime
    }

    #[test]
    fn trace_round_trip_and_formats() {
        let step = TraceStep {
            k: 1,
            b_k: big(5),
            a_k: big(5),
            deviation: BigInt::zero(),
            step_bound: BigInt::zero(),
            global_bound: BigInt::one(),
            candidates: 1,
        };
        let trace = ConstructionTrace { steps: vec![step] };
        let json = trace_to_json(&trace, false);
        assert_eq!(trace_from_json(&json).unwrap(), trace);

        let empty = ConstructionTrace { steps: vec![] };
        assert_eq!(trace_to_json(&empty, false), "[]");
        assert_eq!(trace_to_csv(&empty), "k,b_k,a_k,deviation,step_bound,candidates\n");

        let csv = trace_to_csv(&trace);
        assert_eq!(csv, "k,b_k,a_k,deviation,step_bound,candidates\n1,5,5,0,0,1\n");
    }

    #[test]
    fn huge_integers_round_trip() {
        let huge: BigInt = big(10).pow(200) + 7;
        let step = TraceStep {
            k: 3,
            b_k: -&huge,
            a_k: huge.clone(),
            deviation: &huge * 2,
            step_bound: huge.clone(),
            global_bound: huge.clone(),
            candidates: 9,
        };
        let trace = ConstructionTrace { steps: vec![step] };
        let json = trace_to_json(&trace, false);
        assert!(json.contains(&huge.to_string()));
        assert_eq!(trace_from_json(&json).unwrap(), trace);
    }
}
