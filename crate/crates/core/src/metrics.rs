//! The evaluation suite: Hamming distance, intra/inter-chip HD
//! histograms, uniformity, reliability, uniqueness, and diffusiveness.
//!
//! Every metric accumulates an integer bit count and converts to a
//! percentage in one final expression, so results are reproducible and
//! directly comparable against brute-force recomputation.

use std::collections::BTreeMap;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::population::DeviceId;
use crate::sampler::Response;

/// Number of differing positions between two equal-length bitstrings.
pub fn hamming_distance(a: &Bits, b: &Bits) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count())
}

/// Percentage of 1-bits; ideal 50%.
pub fn uniformity(bits: &Bits) -> Result<f64> {
    if bits.is_empty() {
        return Err(Error::EmptyInput("uniformity needs a non-empty bitstring"));
    }
    Ok(100.0 * bits.count_ones() as f64 / bits.len() as f64)
}

/// 100% minus the average normalized HD between the golden ID and each
/// sample; ideal 100%.
pub fn reliability(golden: &DeviceId, samples: &[DeviceId]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("reliability needs at least one sample"));
    }
    let mut total = 0usize;
    for s in samples {
        total += hamming_distance(golden.bits(), s.bits())?;
    }
    let t = samples.len() as f64;
    let l = golden.len() as f64;
    Ok(100.0 * (1.0 - total as f64 / (t * l)))
}

/// Average normalized pairwise HD between golden IDs of different
/// chips.
pub fn uniqueness(golden_ids: &[DeviceId]) -> Result<f64> {
    let n = golden_ids.len();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "uniqueness needs at least two chips".into(),
        ));
    }
    let l = golden_ids[0].len();
    let mut total = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            total += hamming_distance(golden_ids[i].bits(), golden_ids[j].bits())?;
        }
    }
    Ok(200.0 * total as f64 / ((n * (n - 1)) as f64 * l as f64))
}

/// Rectangular matrix of K per-pair responses from one chip, indexed
/// (pair, bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<Response>,
}

impl BitMatrix {
    pub fn new(rows: Vec<Response>) -> Result<BitMatrix> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("bit matrix needs at least one row"));
        }
        let width = rows[0].len();
        for r in &rows {
            if r.len() != width {
                return Err(Error::LengthMismatch {
                    left: width,
                    right: r.len(),
                });
            }
        }
        Ok(BitMatrix { rows })
    }

    pub fn rows(&self) -> &[Response] {
        &self.rows
    }

    pub fn num_pairs(&self) -> usize {
        self.rows.len()
    }

    pub fn bits_per_pair(&self) -> usize {
        self.rows[0].len()
    }
}

impl From<&DeviceId> for BitMatrix {
    fn from(id: &DeviceId) -> BitMatrix {
        BitMatrix {
            rows: id.per_pair().to_vec(),
        }
    }
}

/// Degree of difference among the K pair responses of one chip:
/// 4/(l*K^2) times the total pairwise XOR count, as a percentage. The
/// normalization makes 100% attainable only for even K; for odd K the
/// maximum is 100*(K^2-1)/K^2.
pub fn diffusiveness(matrix: &BitMatrix) -> Result<f64> {
    let k = matrix.num_pairs();
    if k < 2 {
        return Err(Error::InvalidParameter(
            "diffusiveness needs at least two RO pairs".into(),
        ));
    }
    let l = matrix.bits_per_pair();
    let mut total = 0usize;
    for i in 0..k {
        for j in (i + 1)..k {
            total += hamming_distance(&matrix.rows[i], &matrix.rows[j])?;
        }
    }
    Ok(400.0 * total as f64 / (l as f64 * (k * k) as f64))
}

/// Counts of HD(golden_n, sample_{n,t}) over all chips and samples.
pub fn intra_hd_histogram(
    goldens: &[DeviceId],
    samples_per_chip: &[Vec<DeviceId>],
) -> Result<BTreeMap<usize, u64>> {
    if goldens.len() != samples_per_chip.len() {
        return Err(Error::LengthMismatch {
            left: goldens.len(),
            right: samples_per_chip.len(),
        });
    }
    let mut hist = BTreeMap::new();
    for (golden, samples) in goldens.iter().zip(samples_per_chip) {
        if samples.is_empty() {
            return Err(Error::EmptyInput("intra histogram needs samples"));
        }
        for s in samples {
            *hist.entry(hamming_distance(golden.bits(), s.bits())?).or_insert(0) += 1;
        }
    }
    Ok(hist)
}

/// Counts of HD(golden_i, golden_j) over all chip pairs i < j.
pub fn inter_hd_histogram(goldens: &[DeviceId]) -> Result<BTreeMap<usize, u64>> {
    if goldens.len() < 2 {
        return Err(Error::InvalidParameter(
            "inter histogram needs at least two chips".into(),
        ));
    }
    let mut hist = BTreeMap::new();
    for i in 0..goldens.len() {
        for j in (i + 1)..goldens.len() {
            *hist
                .entry(hamming_distance(goldens[i].bits(), goldens[j].bits())?)
                .or_insert(0) += 1;
        }
    }
    Ok(hist)
}

/// Both histograms at once.
pub fn hd_histograms(
    goldens: &[DeviceId],
    samples_per_chip: &[Vec<DeviceId>],
) -> Result<(BTreeMap<usize, u64>, BTreeMap<usize, u64>)> {
    Ok((
        intra_hd_histogram(goldens, samples_per_chip)?,
        inter_hd_histogram(goldens)?,
    ))
}

/// Smallest HD value attaining the maximum count.
pub fn histogram_mode(hist: &BTreeMap<usize, u64>) -> Option<usize> {
    let max = *hist.values().max()?;
    hist.iter().find(|(_, &c)| c == max).map(|(&hd, _)| hd)
}

/// The full metric suite for one measured population.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub num_chips: usize,
    pub num_pairs: usize,
    pub bits_per_pair: usize,
    pub num_samples: usize,
    pub uniformity_per_chip: Vec<f64>,
    pub uniformity_per_pair: Vec<Vec<f64>>,
    /// None when the campaign had a single sample per chip.
    pub reliability_per_chip: Option<Vec<f64>>,
    /// None when the population has a single chip.
    pub uniqueness: Option<f64>,
    pub diffusiveness_per_chip: Vec<f64>,
    pub intra_hd_hist: BTreeMap<usize, u64>,
    pub inter_hd_hist: BTreeMap<usize, u64>,
}

impl MetricsReport {
    pub fn id_length(&self) -> usize {
        self.num_pairs * self.bits_per_pair
    }

    pub fn avg_uniformity(&self) -> f64 {
        mean(&self.uniformity_per_chip)
    }

    pub fn avg_reliability(&self) -> Option<f64> {
        self.reliability_per_chip.as_deref().map(mean)
    }

    pub fn avg_diffusiveness(&self) -> f64 {
        mean(&self.diffusiveness_per_chip)
    }

    pub fn intra_mode(&self) -> Option<usize> {
        histogram_mode(&self.intra_hd_hist)
    }

    pub fn inter_mode(&self) -> Option<usize> {
        histogram_mode(&self.inter_hd_hist)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Compute every metric computable from goldens plus per-chip samples.
/// Reliability is skipped (None) when every chip has exactly one
/// sample; uniqueness and the inter histogram are skipped for a single
/// chip.
pub fn compute_report(
    goldens: &[DeviceId],
    samples_per_chip: &[Vec<DeviceId>],
) -> Result<MetricsReport> {
    if goldens.is_empty() {
        return Err(Error::EmptyInput("report needs at least one chip"));
    }
    if goldens.len() != samples_per_chip.len() {
        return Err(Error::LengthMismatch {
            left: goldens.len(),
            right: samples_per_chip.len(),
        });
    }
    let num_chips = goldens.len();
    let num_pairs = goldens[0].per_pair().len();
    let bits_per_pair = goldens[0].per_pair().first().map_or(0, Bits::len);
    let num_samples = samples_per_chip.iter().map(Vec::len).max().unwrap_or(0);

    let uniformity_per_chip = goldens
        .iter()
        .map(|g| uniformity(g.bits()))
        .collect::<Result<Vec<f64>>>()?;
    let uniformity_per_pair = goldens
        .iter()
        .map(|g| g.per_pair().iter().map(uniformity).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let reliability_per_chip = if num_samples > 1 {
        Some(
            goldens
                .iter()
                .zip(samples_per_chip)
                .map(|(g, s)| reliability(g, s))
                .collect::<Result<Vec<f64>>>()?,
        )
    } else {
        None
    };
    let uniqueness_value = if num_chips >= 2 {
        Some(uniqueness(goldens)?)
    } else {
        None
    };
    let diffusiveness_per_chip = goldens
        .iter()
        .map(|g| diffusiveness(&BitMatrix::from(g)))
        .collect::<Result<Vec<f64>>>()?;
    let intra_hd_hist = intra_hd_histogram(goldens, samples_per_chip)?;
    let inter_hd_hist = if num_chips >= 2 {
        inter_hd_histogram(goldens)?
    } else {
        BTreeMap::new()
    };

    Ok(MetricsReport {
        num_chips,
        num_pairs,
        bits_per_pair,
        num_samples,
        uniformity_per_chip,
        uniformity_per_pair,
        reliability_per_chip,
        uniqueness: uniqueness_value,
        diffusiveness_per_chip,
        intra_hd_hist,
        inter_hd_hist,
    })
}

/// Average diffusiveness over the first k pairs, for k = 2..=K. The
/// quality of the combined ID grows with the number of pairs.
pub fn diffusiveness_vs_pairs(goldens: &[DeviceId]) -> Result<Vec<(usize, Vec<f64>, f64)>> {
    let num_pairs = goldens
        .first()
        .ok_or(Error::EmptyInput("diffusiveness table needs chips"))?
        .per_pair()
        .len();
    let mut table = Vec::new();
    for k in 2..=num_pairs {
        let per_chip = goldens
            .iter()
            .map(|g| {
                let m = BitMatrix::new(g.per_pair()[..k].to_vec())?;
                diffusiveness(&m)
            })
            .collect::<Result<Vec<f64>>>()?;
        let avg = mean(&per_chip);
        table.push((k, per_chip, avg));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(s: &str) -> Bits {
        s.parse().unwrap()
    }

    fn id(parts: &[&str]) -> DeviceId {
        DeviceId::from_responses(parts.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming_distance(&bits("0000"), &bits("0000")).unwrap(), 0);
        assert_eq!(hamming_distance(&bits("0101"), &bits("1010")).unwrap(), 4);
        assert!(matches!(
            hamming_distance(&bits("01"), &bits("010")),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn uniformity_examples() {
        assert_eq!(uniformity(&bits("1111111111111111")).unwrap(), 100.0);
        assert_eq!(uniformity(&bits("01010101")).unwrap(), 50.0);
        let printed = bits("011111111111000000000011111100000000");
        assert_eq!(printed.count_ones(), 17);
        let u = uniformity(&printed).unwrap();
        assert!((u - 100.0 * 17.0 / 36.0).abs() < 1e-12);
        assert!(matches!(uniformity(&Bits::new()), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn reliability_examples() {
        let golden = id(&["0000000000000000"]);
        let same = vec![golden.clone(), golden.clone()];
        assert_eq!(reliability(&golden, &same).unwrap(), 100.0);
        let one_off = vec![golden.clone(), id(&["1000000000000000"])];
        assert_eq!(reliability(&golden, &one_off).unwrap(), 96.875);
    }

    #[test]
    fn uniqueness_examples() {
        let a = id(&["0000"]);
        assert_eq!(uniqueness(&[a.clone(), id(&["1111"])]).unwrap(), 100.0);
        assert_eq!(uniqueness(&[a.clone(), a.clone()]).unwrap(), 0.0);
        let three = [a, id(&["0011"]), id(&["1111"])];
        let u = uniqueness(&three).unwrap();
        assert!((u - 200.0 / 3.0).abs() < 1e-12, "got {u}");
        assert!(uniqueness(&three[..1]).is_err());
    }

    #[test]
    fn diffusiveness_examples() {
        let same = BitMatrix::new(vec![bits("0101"), bits("0101"), bits("0101")]).unwrap();
        assert_eq!(diffusiveness(&same).unwrap(), 0.0);
        let complementary = BitMatrix::new(vec![bits("01100110"), bits("10011001")]).unwrap();
        assert_eq!(diffusiveness(&complementary).unwrap(), 100.0);
        let half = BitMatrix::new(vec![bits("0000"), bits("0011")]).unwrap();
        assert_eq!(diffusiveness(&half).unwrap(), 50.0);
        let single = BitMatrix::new(vec![bits("0000")]).unwrap();
        assert!(diffusiveness(&single).is_err());
    }

    #[test]
    fn histogram_shapes() {
        let g0 = id(&["0000"]);
        let g1 = id(&["0000"]);
        let samples = vec![vec![g0.clone(), g0.clone()], vec![g1.clone()]];
        let (intra, inter) = hd_histograms(&[g0, g1], &samples).unwrap();
        assert_eq!(intra, BTreeMap::from([(0, 3)]));
        assert_eq!(inter, BTreeMap::from([(0, 1)]));
        assert_eq!(histogram_mode(&intra), Some(0));
    }

    #[test]
    fn report_single_chip_has_no_uniqueness() {
        let g = id(&["0011", "1100"]);
        let report = compute_report(&[g.clone()], &[vec![g]]).unwrap();
        assert!(report.uniqueness.is_none());
        assert!(report.reliability_per_chip.is_none());
        assert!(report.inter_hd_hist.is_empty());
        assert_eq!(report.id_length(), 8);
    }

    #[test]
    fn diffusiveness_table_is_monotone_for_equal_rates() {
        // equal pairwise difference rates give 2*d*(1 - 1/k), strictly
        // increasing in k
        let g = id(&["0000", "0011", "0101"]);
        let table = diffusiveness_vs_pairs(&[g]).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].0, 2);
        assert_eq!(table[0].2, 50.0);
        assert!((table[1].2 - 200.0 / 3.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(
            a in proptest::collection::vec(any::<bool>(), 1..64),
            b in proptest::collection::vec(any::<bool>(), 1..64),
            c in proptest::collection::vec(any::<bool>(), 1..64),
        ) {
            let n = a.len().min(b.len()).min(c.len());
            let a = Bits::from(a[..n].to_vec());
            let b = Bits::from(b[..n].to_vec());
            let c = Bits::from(c[..n].to_vec());
            let ab = hamming_distance(&a, &b).unwrap();
            let ba = hamming_distance(&b, &a).unwrap();
            let ac = hamming_distance(&a, &c).unwrap();
            let cb = hamming_distance(&c, &b).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(hamming_distance(&a, &a).unwrap(), 0);
            prop_assert!((ab == 0) == (a == b));
            prop_assert!(ab <= ac + cb);
        }

        #[test]
        fn uniformity_complement(a in proptest::collection::vec(any::<bool>(), 1..128)) {
            let x = Bits::from(a);
            let u = uniformity(&x).unwrap();
            let uc = uniformity(&x.complement()).unwrap();
            prop_assert!((u + uc - 100.0).abs() < 1e-9);
        }

        #[test]
        fn uniqueness_is_permutation_invariant(
            rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 8), 2..6),
            swap in any::<(usize, usize)>(),
        ) {
            let ids: Vec<DeviceId> = rows
                .iter()
                .map(|r| DeviceId::from_responses(vec![Bits::from(r.clone())]))
                .collect();
            let mut permuted = ids.clone();
            let (i, j) = (swap.0 % ids.len(), swap.1 % ids.len());
            permuted.swap(i, j);
            prop_assert_eq!(uniqueness(&ids).unwrap(), uniqueness(&permuted).unwrap());
        }

        #[test]
        fn diffusiveness_respects_odd_k_bound(
            rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 2..8),
        ) {
            let k = rows.len();
            let m = BitMatrix::new(rows.into_iter().map(Bits::from).collect()).unwrap();
            let d = diffusiveness(&m).unwrap();
            let bound = if k % 2 == 0 {
                100.0
            } else {
                100.0 * ((k * k - 1) as f64) / ((k * k) as f64)
            };
            prop_assert!(d <= bound + 1e-9, "d = {d}, bound = {bound}, k = {k}");
        }
    }
}
