//! The response-corpus text format: measured (or simulated) per-pair
//! bitstrings, one record per line.
//!
//! ```text
//! # comment lines start with '#'
//! l_RO=36<TAB>K=5<TAB>N=1<TAB>T=1[<TAB>sparse]
//! <chip><TAB><pair><TAB><sample><TAB><bitstring>
//! ```
//!
//! Unless the header carries the `sparse` flag, the (chip, pair,
//! sample) grid must be complete. Sparse corpora may omit whole
//! samples, but any sample that appears must carry all K pairs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::population::DeviceId;
use crate::sampler::Response;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusHeader {
    pub bits_per_pair: usize,
    pub num_pairs: usize,
    pub num_chips: usize,
    pub num_samples: usize,
    pub sparse: bool,
}

/// A parsed corpus: per chip, per sample index, one device ID.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCorpus {
    pub header: CorpusHeader,
    pub samples_per_chip: Vec<Vec<DeviceId>>,
}

pub fn read_corpus(path: &Path) -> Result<ResponseCorpus> {
    let text = fs::read_to_string(path)?;
    parse_corpus(&text)
}

pub fn parse_corpus(text: &str) -> Result<ResponseCorpus> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());

    let (line_no, header_line) = lines
        .next()
        .ok_or(Error::EmptyInput("corpus file has no header line"))?;
    let header = parse_header(line_no, header_line)?;

    // grid[chip][sample][pair]
    let mut grid: BTreeMap<usize, BTreeMap<usize, Vec<Option<Response>>>> = BTreeMap::new();
    for (line_no, line) in lines {
        let (chip, pair, sample, bits) = parse_record(line_no, line, &header)?;
        let pairs = grid
            .entry(chip)
            .or_default()
            .entry(sample)
            .or_insert_with(|| vec![None; header.num_pairs]);
        if pairs[pair].is_some() {
            return Err(Error::CorpusParse {
                line: line_no,
                msg: format!("duplicate record for chip {chip} pair {pair} sample {sample}"),
            });
        }
        pairs[pair] = Some(bits);
    }

    assemble(header, grid)
}

fn parse_header(line_no: usize, line: &str) -> Result<CorpusHeader> {
    let err = |msg: String| Error::CorpusParse { line: line_no, msg };
    let mut fields = line.split('\t');
    let mut take = |key: &str| -> Result<usize> {
        let field = fields
            .next()
            .ok_or_else(|| err(format!("missing header field {key}")))?;
        let value = field
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| err(format!("expected {key}=<int>, got {field:?}")))?;
        value
            .parse::<usize>()
            .map_err(|e| err(format!("bad {key} value {value:?}: {e}")))
    };
    let bits_per_pair = take("l_RO")?;
    let num_pairs = take("K")?;
    let num_chips = take("N")?;
    let num_samples = take("T")?;
    let sparse = match fields.next() {
        None => false,
        Some("sparse") => true,
        Some(other) => return Err(err(format!("unexpected header field {other:?}"))),
    };
    if bits_per_pair == 0 || num_pairs == 0 || num_chips == 0 || num_samples == 0 {
        return Err(err("header dimensions must all be >= 1".into()));
    }
    Ok(CorpusHeader {
        bits_per_pair,
        num_pairs,
        num_chips,
        num_samples,
        sparse,
    })
}

fn parse_record(
    line_no: usize,
    line: &str,
    header: &CorpusHeader,
) -> Result<(usize, usize, usize, Response)> {
    let err = |msg: String| Error::CorpusParse { line: line_no, msg };
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 4 {
        return Err(err(format!(
            "expected 4 tab-separated fields, got {}",
            fields.len()
        )));
    }
    let index = |name: &str, s: &str, limit: usize| -> Result<usize> {
        let v = s
            .parse::<usize>()
            .map_err(|e| err(format!("bad {name} {s:?}: {e}")))?;
        if v >= limit {
            return Err(err(format!("{name} {v} out of range 0..{limit}")));
        }
        Ok(v)
    };
    let chip = index("chip_id", fields[0], header.num_chips)?;
    let pair = index("pair_id", fields[1], header.num_pairs)?;
    let sample = index("sample_index", fields[2], header.num_samples)?;
    let bits = Bits::from_str(fields[3]).map_err(|e| err(e.to_string()))?;
    if bits.len() != header.bits_per_pair {
        return Err(err(format!(
            "bitstring length {} does not match l_RO={}",
            bits.len(),
            header.bits_per_pair
        )));
    }
    Ok((chip, pair, sample, bits))
}

fn assemble(
    header: CorpusHeader,
    grid: BTreeMap<usize, BTreeMap<usize, Vec<Option<Response>>>>,
) -> Result<ResponseCorpus> {
    let missing = |msg: String| Error::CorpusParse { line: 0, msg };
    let mut samples_per_chip = Vec::with_capacity(header.num_chips);
    for chip in 0..header.num_chips {
        let samples = grid
            .get(&chip)
            .ok_or_else(|| missing(format!("chip {chip} has no records")))?;
        if !header.sparse && samples.len() != header.num_samples {
            return Err(missing(format!(
                "chip {chip} has {} samples, header says T={}",
                samples.len(),
                header.num_samples
            )));
        }
        let mut ids = Vec::with_capacity(samples.len());
        for (&sample, pairs) in samples {
            let complete = pairs
                .iter()
                .enumerate()
                .map(|(pair, r)| {
                    r.clone().ok_or_else(|| {
                        missing(format!("chip {chip} sample {sample} is missing pair {pair}"))
                    })
                })
                .collect::<Result<Vec<Response>>>()?;
            ids.push(DeviceId::from_responses(complete));
        }
        samples_per_chip.push(ids);
    }
    Ok(ResponseCorpus {
        header,
        samples_per_chip,
    })
}

/// Serialize a measured population. Records are emitted chip-major,
/// then sample, then pair, so output bytes are deterministic.
pub fn write_corpus(samples_per_chip: &[Vec<DeviceId>]) -> Result<String> {
    let num_chips = samples_per_chip.len();
    if num_chips == 0 {
        return Err(Error::EmptyInput("corpus needs at least one chip"));
    }
    let num_samples = samples_per_chip[0].len();
    let first = samples_per_chip[0]
        .first()
        .ok_or(Error::EmptyInput("corpus needs at least one sample"))?;
    let num_pairs = first.per_pair().len();
    let bits_per_pair = first.per_pair()[0].len();

    let mut out = String::new();
    let _ = writeln!(out, "l_RO={bits_per_pair}\tK={num_pairs}\tN={num_chips}\tT={num_samples}");
    for (chip, samples) in samples_per_chip.iter().enumerate() {
        for (sample, id) in samples.iter().enumerate() {
            for (pair, bits) in id.per_pair().iter().enumerate() {
                let _ = writeln!(out, "{chip}\t{pair}\t{sample}\t{bits}");
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_chip_corpus() -> String {
        let mk = |s: &str| -> DeviceId {
            DeviceId::from_responses(vec![s[..4].parse().unwrap(), s[4..].parse().unwrap()])
        };
        let chips = vec![
            vec![mk("00001111"), mk("00001110")],
            vec![mk("10100101"), mk("10100101")],
        ];
        write_corpus(&chips).unwrap()
    }

    #[test]
    fn roundtrip() {
        let text = two_chip_corpus();
        let corpus = parse_corpus(&text).unwrap();
        assert_eq!(
            corpus.header,
            CorpusHeader {
                bits_per_pair: 4,
                num_pairs: 2,
                num_chips: 2,
                num_samples: 2,
                sparse: false
            }
        );
        assert_eq!(corpus.samples_per_chip[0][1].bits().to_string(), "00001110");
        assert_eq!(write_corpus(&corpus.samples_per_chip).unwrap(), text);
    }

    #[test]
    fn empty_file_errors() {
        assert!(matches!(parse_corpus(""), Err(Error::EmptyInput(_))));
        assert!(matches!(parse_corpus("# only comments\n"), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "l_RO=4\tK=1\tN=1\tT=1\n0\t0\t0\t01x1\n";
        match parse_corpus(text) {
            Err(Error::CorpusParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected corpus error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_length_errors() {
        let text = "l_RO=4\tK=1\tN=1\tT=1\n0\t0\t0\t011\n";
        match parse_corpus(text) {
            Err(Error::CorpusParse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("length"), "{msg}");
            }
            other => panic!("expected corpus error, got {other:?}"),
        }
    }

    #[test]
    fn incomplete_grid_errors_unless_sparse() {
        let text = "l_RO=4\tK=2\tN=1\tT=1\n0\t0\t0\t0110\n";
        assert!(parse_corpus(text).is_err());
        // sparse still requires complete samples
        let text = "l_RO=4\tK=2\tN=1\tT=2\tsparse\n0\t0\t0\t0110\n0\t1\t0\t0011\n";
        let corpus = parse_corpus(text).unwrap();
        assert_eq!(corpus.samples_per_chip[0].len(), 1);
        let text = "l_RO=4\tK=2\tN=1\tT=2\tsparse\n0\t0\t0\t0110\n";
        assert!(parse_corpus(text).is_err());
    }

    #[test]
    fn duplicate_record_errors() {
        let text = "l_RO=4\tK=1\tN=1\tT=1\n0\t0\t0\t0110\n0\t0\t0\t0110\n";
        match parse_corpus(text) {
            Err(Error::CorpusParse { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("duplicate"), "{msg}");
            }
            other => panic!("expected duplicate error, got {other:?}"),
        }
    }

    #[test]
    fn out_of_range_indices_error() {
        let text = "l_RO=4\tK=1\tN=1\tT=1\n1\t0\t0\t0110\n";
        assert!(parse_corpus(text).is_err());
    }
}
