//! Hierarchical machine model and PE distance oracles.
//!
//! A homogeneous hierarchy `S = a_1:...:a_l` groups `a_1` PEs into a
//! processor, `a_2` processors into a node, and so on, with `k = a_1 * ... * a_l`
//! PEs in total. Two PEs whose smallest common module sits at level `j`
//! communicate at cost `d_j`. PE ids are consecutive inside every module.
//!
//! Four interchangeable oracles answer distance queries: an explicit `k x k`
//! matrix, repeated integer division, a table of precomputed quotients, and
//! per-PE binary labels compared with XOR and a leading-zero count.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::Weight;

pub type PeId = usize;

/// Width of a binary PE label.
pub const LABEL_BITS: u32 = u64::BITS;

/// Distance between processing elements.
pub trait PeDistance {
    /// Number of PEs `k`.
    fn pe_count(&self) -> usize;

    /// Distance between two PEs. Ids must be below [`PeDistance::pe_count`].
    fn distance(&self, a: PeId, b: PeId) -> Weight;

    fn checked_distance(&self, a: PeId, b: PeId) -> Result<Weight> {
        let k = self.pe_count();
        for id in [a, b] {
            if id >= k {
                return Err(Error::PeOutOfRange { id, k });
            }
        }
        Ok(self.distance(a, b))
    }
}

impl<T: PeDistance + ?Sized> PeDistance for &T {
    #[inline]
    fn pe_count(&self) -> usize {
        (**self).pe_count()
    }

    #[inline]
    fn distance(&self, a: PeId, b: PeId) -> Weight {
        (**self).distance(a, b)
    }
}

/// Machine hierarchy `S` with per-level communication costs `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchySpec {
    arities: Vec<usize>,
    costs: Vec<Weight>,
    k: usize,
}

impl HierarchySpec {
    pub fn new(arities: Vec<usize>, costs: Vec<Weight>) -> Result<Self> {
        if arities.is_empty() {
            return Err(Error::InvalidHierarchy("at least one level is required".into()));
        }
        if arities.len() != costs.len() {
            return Err(Error::InvalidHierarchy(format!(
                "hierarchy has {} levels but {} distances were given",
                arities.len(),
                costs.len()
            )));
        }
        if let Some(i) = arities.iter().position(|&a| a == 0) {
            return Err(Error::InvalidHierarchy(format!("arity of level {} is zero", i + 1)));
        }
        if let Some(i) = costs.iter().position(|&d| d <= 0) {
            return Err(Error::InvalidHierarchy(format!(
                "distance of level {} must be positive",
                i + 1
            )));
        }
        let k = arities
            .iter()
            .try_fold(1usize, |acc, &a| acc.checked_mul(a))
            .filter(|&k| k <= u32::MAX as usize)
            .ok_or_else(|| Error::InvalidHierarchy("PE count overflows".into()))?;
        Ok(Self { arities, costs, k })
    }

    /// Parses colon-separated sequences such as `"4:16:8"` and `"1:10:100"`.
    pub fn parse(hierarchy: &str, distances: &str) -> Result<Self> {
        Self::new(parse_sequence(hierarchy)?, parse_sequence(distances)?)
    }

    #[inline]
    pub fn levels(&self) -> usize {
        self.arities.len()
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn costs(&self) -> &[Weight] {
        &self.costs
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// `h = (1, a_1, a_1 a_2, ..., a_1 ... a_{l-1})`: number of PEs in one
    /// module of the level below.
    pub fn divisors(&self) -> Vec<usize> {
        let mut h = Vec::with_capacity(self.levels());
        let mut acc = 1;
        for &a in &self.arities {
            h.push(acc);
            acc *= a;
        }
        h
    }

    /// Bits per label section, `ceil(log2(max a_t))`.
    pub fn section_bits(&self) -> u32 {
        let max = *self.arities.iter().max().unwrap();
        if max <= 1 {
            0
        } else {
            usize::BITS - (max - 1).leading_zeros()
        }
    }

    pub fn label_bits(&self) -> u32 {
        self.section_bits() * self.levels() as u32
    }

    /// 0 when `a == b`, otherwise the 1-based level of the smallest module
    /// containing both PEs.
    pub fn level_of(&self, a: PeId, b: PeId) -> usize {
        if a == b {
            return 0;
        }
        let h = self.divisors();
        (0..self.levels())
            .rev()
            .find(|&i| a / h[i] != b / h[i])
            .map_or(0, |i| i + 1)
    }

    pub fn is_power_of_two_k(&self) -> bool {
        self.k.is_power_of_two()
    }
}

impl fmt::Display for HierarchySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: Vec<String>| xs.join(":");
        write!(
            f,
            "S={} D={}",
            join(self.arities.iter().map(|a| a.to_string()).collect()),
            join(self.costs.iter().map(|d| d.to_string()).collect())
        )
    }
}

fn parse_sequence<T: FromStr>(text: &str) -> Result<Vec<T>> {
    text.split(':')
        .map(|part| {
            part.trim().parse::<T>().map_err(|_| {
                Error::InvalidHierarchy(format!("'{part}' in '{text}' is not a positive integer"))
            })
        })
        .collect()
}

/// Selects a distance oracle implementation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleVariant {
    Matrix,
    Division,
    StoredDivision,
    Binary,
}

impl OracleVariant {
    pub const ALL: [OracleVariant; 4] = [
        OracleVariant::Matrix,
        OracleVariant::Division,
        OracleVariant::StoredDivision,
        OracleVariant::Binary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleVariant::Matrix => "matrix",
            OracleVariant::Division => "division",
            OracleVariant::StoredDivision => "stored-division",
            OracleVariant::Binary => "binary",
        }
    }
}

impl fmt::Display for OracleVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matrix" => Ok(OracleVariant::Matrix),
            "division" => Ok(OracleVariant::Division),
            "stored-division" | "stored_division" => Ok(OracleVariant::StoredDivision),
            "binary" => Ok(OracleVariant::Binary),
            other => Err(Error::InvalidParameter(format!(
                "unknown oracle '{other}' (expected matrix, division, stored-division or binary)"
            ))),
        }
    }
}

/// Fully materialized `k x k` distance matrix.
#[derive(Clone, Debug)]
pub struct MatrixDistance {
    k: usize,
    data: Vec<Weight>,
}

impl MatrixDistance {
    pub fn from_spec(spec: &HierarchySpec) -> Self {
        let k = spec.k();
        let h = spec.divisors();
        let mut data = vec![0; k * k];
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    let level = (0..spec.levels())
                        .rev()
                        .find(|&i| a / h[i] != b / h[i])
                        .expect("distinct PEs differ at some level");
                    data[a * k + b] = spec.costs()[level];
                }
            }
        }
        Self { k, data }
    }

    /// Arbitrary symmetric matrix with zero diagonal and non-negative entries.
    pub fn from_rows(rows: &[Vec<Weight>]) -> Result<Self> {
        let k = rows.len();
        let mut data = Vec::with_capacity(k * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        for i in 0..k {
            if data[i * k + i] != 0 {
                return Err(Error::InvalidParameter(format!("diagonal entry {i} is not zero")));
            }
            for j in 0..k {
                if data[i * k + j] != data[j * k + i] || data[i * k + j] < 0 {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) breaks symmetry or is negative"
                    )));
                }
            }
        }
        Ok(Self { k, data })
    }

    pub fn entries(&self) -> usize {
        self.data.len()
    }
}

impl PeDistance for MatrixDistance {
    #[inline]
    fn pe_count(&self) -> usize {
        self.k
    }

    #[inline]
    fn distance(&self, a: PeId, b: PeId) -> Weight {
        self.data[a * self.k + b]
    }
}

/// `O(l)` integer divisions per query, `O(l)` memory.
#[derive(Clone, Debug)]
pub struct DivisionDistance {
    k: usize,
    divisors: Vec<usize>,
    costs: Vec<Weight>,
}

impl DivisionDistance {
    pub fn from_spec(spec: &HierarchySpec) -> Self {
        Self {
            k: spec.k(),
            divisors: spec.divisors(),
            costs: spec.costs().to_vec(),
        }
    }

    pub fn divisors(&self) -> &[usize] {
        &self.divisors
    }
}

impl PeDistance for DivisionDistance {
    #[inline]
    fn pe_count(&self) -> usize {
        self.k
    }

    #[inline]
    fn distance(&self, a: PeId, b: PeId) -> Weight {
        if a == b {
            return 0;
        }
        for i in (0..self.divisors.len()).rev() {
            let h = self.divisors[i];
            if a / h != b / h {
                return self.costs[i];
            }
        }
        0
    }
}

/// All quotients `b div h_i` precomputed: `O(k l)` memory, `O(l)` comparisons.
#[derive(Clone, Debug)]
pub struct StoredDivisionDistance {
    k: usize,
    levels: usize,
    /// Quotients of PE `b` live in `table[b * levels .. (b + 1) * levels]`.
    table: Vec<u32>,
    costs: Vec<Weight>,
}

impl StoredDivisionDistance {
    pub fn from_spec(spec: &HierarchySpec) -> Self {
        let h = spec.divisors();
        let levels = spec.levels();
        let table = (0..spec.k())
            .flat_map(|b| h.iter().map(move |&hi| (b / hi) as u32))
            .collect();
        Self {
            k: spec.k(),
            levels,
            table,
            costs: spec.costs().to_vec(),
        }
    }

    /// Stored quotient `b div h_i` (level index `i` is 0-based).
    pub fn quotient(&self, level: usize, b: PeId) -> u32 {
        self.table[b * self.levels + level]
    }

    pub fn entries(&self) -> usize {
        self.table.len()
    }
}

impl PeDistance for StoredDivisionDistance {
    #[inline]
    fn pe_count(&self) -> usize {
        self.k
    }

    #[inline]
    fn distance(&self, a: PeId, b: PeId) -> Weight {
        if a == b {
            return 0;
        }
        let qa = &self.table[a * self.levels..(a + 1) * self.levels];
        let qb = &self.table[b * self.levels..(b + 1) * self.levels];
        for i in (0..self.levels).rev() {
            if qa[i] != qb[i] {
                return self.costs[i];
            }
        }
        0
    }
}

/// One packed label per PE; the level is found from the most significant
/// set bit of `label(a) ^ label(b)`.
#[derive(Clone, Debug)]
pub struct BinaryDistance {
    labels: Vec<u64>,
    section_bits: u32,
    costs: Vec<Weight>,
}

impl BinaryDistance {
    pub fn from_spec(spec: &HierarchySpec) -> Result<Self> {
        check_label_width(spec)?;
        let labels = (0..spec.k()).map(|b| pack_label(spec, b)).collect();
        Ok(Self {
            labels,
            section_bits: spec.section_bits(),
            costs: spec.costs().to_vec(),
        })
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn section_bits(&self) -> u32 {
        self.section_bits
    }
}

impl PeDistance for BinaryDistance {
    #[inline]
    fn pe_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    fn distance(&self, a: PeId, b: PeId) -> Weight {
        let x = self.labels[a] ^ self.labels[b];
        if x == 0 {
            return 0;
        }
        let msb = u64::BITS - 1 - x.leading_zeros();
        self.costs[(msb / self.section_bits) as usize]
    }
}

fn check_label_width(spec: &HierarchySpec) -> Result<()> {
    let required_bits = spec.label_bits();
    if required_bits > LABEL_BITS {
        return Err(Error::LabelOverflow {
            required_bits,
            available_bits: LABEL_BITS,
        });
    }
    Ok(())
}

fn pack_label(spec: &HierarchySpec, b: PeId) -> u64 {
    let s = spec.section_bits();
    let mut t = b;
    let mut label = 0u64;
    for (i, &a) in spec.arities().iter().enumerate() {
        label |= ((t % a) as u64) << (s * i as u32);
        t /= a;
    }
    label
}

/// Binary label of PE `b`: section `i` (least significant first) holds the
/// `i`-th remainder of repeatedly dividing `b` by `a_1, ..., a_l`.
pub fn encode_binary_label(spec: &HierarchySpec, b: PeId) -> Result<u64> {
    if b >= spec.k() {
        return Err(Error::PeOutOfRange { id: b, k: spec.k() });
    }
    check_label_width(spec)?;
    Ok(pack_label(spec, b))
}

/// Any of the four distance implementations.
#[derive(Clone, Debug)]
pub enum DistanceOracle {
    Matrix(MatrixDistance),
    Division(DivisionDistance),
    StoredDivision(StoredDivisionDistance),
    Binary(BinaryDistance),
}

impl DistanceOracle {
    pub fn variant(&self) -> OracleVariant {
        match self {
            DistanceOracle::Matrix(_) => OracleVariant::Matrix,
            DistanceOracle::Division(_) => OracleVariant::Division,
            DistanceOracle::StoredDivision(_) => OracleVariant::StoredDivision,
            DistanceOracle::Binary(_) => OracleVariant::Binary,
        }
    }

    /// Number of stored integers backing the oracle.
    pub fn memory_words(&self) -> usize {
        match self {
            DistanceOracle::Matrix(m) => m.entries(),
            DistanceOracle::Division(d) => d.divisors.len() + d.costs.len(),
            DistanceOracle::StoredDivision(s) => s.entries() + s.costs.len(),
            DistanceOracle::Binary(b) => b.labels.len() + b.costs.len(),
        }
    }
}

impl PeDistance for DistanceOracle {
    #[inline]
    fn pe_count(&self) -> usize {
        match self {
            DistanceOracle::Matrix(o) => o.pe_count(),
            DistanceOracle::Division(o) => o.pe_count(),
            DistanceOracle::StoredDivision(o) => o.pe_count(),
            DistanceOracle::Binary(o) => o.pe_count(),
        }
    }

    #[inline]
    fn distance(&self, a: PeId, b: PeId) -> Weight {
        match self {
            DistanceOracle::Matrix(o) => o.distance(a, b),
            DistanceOracle::Division(o) => o.distance(a, b),
            DistanceOracle::StoredDivision(o) => o.distance(a, b),
            DistanceOracle::Binary(o) => o.distance(a, b),
        }
    }
}

pub fn build_oracle(spec: &HierarchySpec, variant: OracleVariant) -> Result<DistanceOracle> {
    Ok(match variant {
        OracleVariant::Matrix => DistanceOracle::Matrix(MatrixDistance::from_spec(spec)),
        OracleVariant::Division => DistanceOracle::Division(DivisionDistance::from_spec(spec)),
        OracleVariant::StoredDivision => {
            DistanceOracle::StoredDivision(StoredDivisionDistance::from_spec(spec))
        }
        OracleVariant::Binary => DistanceOracle::Binary(BinaryDistance::from_spec(spec)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(s: &str, d: &str) -> HierarchySpec {
        HierarchySpec::parse(s, d).unwrap()
    }

    #[test]
    fn two_by_two_matrix() {
        let m = MatrixDistance::from_spec(&spec("2:2", "1:10"));
        let expected = [[0, 1, 10, 10], [1, 0, 10, 10], [10, 10, 0, 1], [10, 10, 1, 0]];
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(m.distance(a, b), expected[a][b], "({a}, {b})");
            }
        }
    }

    #[test]
    fn divisors_and_label_width() {
        let s = spec("4:16:2", "1:10:100");
        assert_eq!(s.k(), 128);
        assert_eq!(s.divisors(), vec![1, 4, 64]);
        assert_eq!(s.section_bits(), 4);
        assert_eq!(s.label_bits(), 12);
    }

    #[test]
    fn label_examples() {
        let s = spec("4:16:2", "1:10:100");
        assert_eq!(encode_binary_label(&s, 0).unwrap(), 0);
        assert_eq!(encode_binary_label(&s, 37).unwrap(), 0x091);
        assert_eq!(encode_binary_label(&s, 38).unwrap(), 0x092);
        let small = spec("2:2", "1:10");
        assert_eq!(small.section_bits(), 1);
        assert_eq!(encode_binary_label(&small, 3).unwrap(), 0b11);
        assert!(matches!(
            encode_binary_label(&small, 4),
            Err(Error::PeOutOfRange { id: 4, k: 4 })
        ));
    }

    #[test]
    fn distance_examples() {
        let s = spec("4:16:2", "1:10:100");
        for variant in OracleVariant::ALL {
            let o = build_oracle(&s, variant).unwrap();
            assert_eq!(o.distance(37, 38), 1, "{variant}");
            assert_eq!(o.distance(3, 4), 10, "{variant}");
            assert_eq!(o.distance(63, 64), 100, "{variant}");
            assert_eq!(o.distance(77, 77), 0, "{variant}");
            assert!(o.checked_distance(0, 128).is_err());
        }
    }

    #[test]
    fn label_overflow_names_required_bits() {
        let s = HierarchySpec::new(vec![2; 31], vec![1; 31]).unwrap();
        assert_eq!(s.label_bits(), 31);
        assert!(check_label_width(&s).is_ok());
        let wide = HierarchySpec::new(vec![16; 7], vec![1; 7]).unwrap();
        assert_eq!(wide.label_bits(), 28);
        // 17 levels of arity 16 need 68 bits; k would overflow, so build directly.
        let s = HierarchySpec {
            arities: vec![16; 17],
            costs: vec![1; 17],
            k: 0,
        };
        match build_oracle(&s, OracleVariant::Binary) {
            Err(Error::LabelOverflow { required_bits, .. }) => assert_eq!(required_bits, 68),
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(HierarchySpec::parse("4:16", "1:10:100").is_err());
        assert!(HierarchySpec::parse("4:0", "1:10").is_err());
        assert!(HierarchySpec::parse("4:x", "1:10").is_err());
        assert!(HierarchySpec::parse("4", "0").is_err());
    }

    #[test]
    fn unit_arities() {
        let s = spec("1:1:1", "1:10:100");
        assert_eq!(s.k(), 1);
        assert_eq!(s.section_bits(), 0);
        for variant in OracleVariant::ALL {
            assert_eq!(build_oracle(&s, variant).unwrap().distance(0, 0), 0);
        }
        let s = spec("4:1:2", "1:10:100");
        let m = build_oracle(&s, OracleVariant::Matrix).unwrap();
        let b = build_oracle(&s, OracleVariant::Binary).unwrap();
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(m.distance(x, y), b.distance(x, y));
            }
        }
    }

    #[test]
    fn construction_sizes() {
        let s = spec("4:16:2", "1:10:100");
        match build_oracle(&s, OracleVariant::Matrix).unwrap() {
            DistanceOracle::Matrix(m) => assert_eq!(m.entries(), 128 * 128),
            _ => unreachable!(),
        }
        match build_oracle(&s, OracleVariant::Binary).unwrap() {
            DistanceOracle::Binary(b) => assert_eq!(b.labels().len(), 128),
            _ => unreachable!(),
        }
        match build_oracle(&s, OracleVariant::StoredDivision).unwrap() {
            DistanceOracle::StoredDivision(t) => {
                assert_eq!(t.entries(), 3 * 128);
                assert_eq!(t.quotient(1, 37), 9);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn level_of_matches_costs() {
        let s = spec("4:16:2", "1:10:100");
        assert_eq!(s.level_of(5, 5), 0);
        assert_eq!(s.level_of(37, 38), 1);
        assert_eq!(s.level_of(3, 4), 2);
        assert_eq!(s.level_of(0, 127), 3);
    }

    fn small_spec() -> impl Strategy<Value = HierarchySpec> {
        prop::collection::vec((1usize..6, 1i64..50), 1..4).prop_map(|levels| {
            let (a, d): (Vec<_>, Vec<_>) = levels.into_iter().unzip();
            HierarchySpec::new(a, d).unwrap()
        })
    }

    proptest! {
        #[test]
        fn variants_agree_with_matrix(s in small_spec()) {
            let reference = MatrixDistance::from_spec(&s);
            let others: Vec<_> = OracleVariant::ALL
                .iter()
                .map(|&v| build_oracle(&s, v).unwrap())
                .collect();
            for a in 0..s.k() {
                for b in 0..s.k() {
                    let want = reference.distance(a, b);
                    prop_assert_eq!(want, reference.distance(b, a));
                    for o in &others {
                        prop_assert_eq!(o.distance(a, b), want);
                    }
                }
                prop_assert_eq!(reference.distance(a, a), 0);
            }
        }

        #[test]
        fn module_members_are_equidistant_from_outsiders(s in small_spec()) {
            let o = MatrixDistance::from_spec(&s);
            let mut size = 1;
            for &a in s.arities() {
                size *= a;
                for x in 0..s.k() {
                    for y in 0..s.k() {
                        if x / size != y / size {
                            continue;
                        }
                        for z in 0..s.k() {
                            if z / size != x / size {
                                prop_assert_eq!(o.distance(x, z), o.distance(y, z));
                            }
                        }
                    }
                }
            }
        }
    }
}
