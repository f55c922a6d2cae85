//! Categorical search spaces and their Boolean encoding.
//!
//! A combination is ranked in mixed radix with the first variable most
//! significant, and the rank is written as an `m`-bit big-endian Boolean
//! vector where `m` is the smallest integer with `2^m >= N`. For all-binary
//! spaces this is the identity on bit patterns.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CboError, Result};

/// Largest supported code length. Ranks are held in a `u64`.
pub const MAX_CODE_LENGTH: usize = 63;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CategoricalSpace {
    arities: Vec<usize>,
    cardinality: u64,
    code_length: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Combination(pub Vec<usize>);

/// Bits stored as `0`/`1` bytes, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BooleanVector(pub Vec<u8>);

impl CategoricalSpace {
    pub fn new(arities: Vec<usize>) -> Result<Self> {
        if arities.is_empty() {
            return Err(CboError::InvalidSpace("at least one variable is required".into()));
        }
        if let Some(pos) = arities.iter().position(|&a| a < 2) {
            return Err(CboError::InvalidSpace(format!(
                "variable {pos} has arity {}, every arity must be >= 2",
                arities[pos]
            )));
        }
        let mut cardinality: u64 = 1;
        for &a in &arities {
            cardinality = cardinality
                .checked_mul(a as u64)
                .ok_or_else(|| CboError::InvalidSpace("cardinality overflows u64".into()))?;
        }
        let code_length = code_length_for(cardinality);
        if code_length > MAX_CODE_LENGTH {
            return Err(CboError::InvalidSpace(format!(
                "code length {code_length} exceeds {MAX_CODE_LENGTH}"
            )));
        }
        Ok(Self {
            arities,
            cardinality,
            code_length,
        })
    }

    /// `m` binary variables.
    pub fn binary(m: usize) -> Result<Self> {
        Self::new(vec![2; m])
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    /// Number of variables `k`.
    pub fn num_variables(&self) -> usize {
        self.arities.len()
    }

    /// `N`, the number of combinations.
    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    /// `m`, the Boolean code length.
    pub fn code_length(&self) -> usize {
        self.code_length
    }

    pub fn is_binary(&self) -> bool {
        self.arities.iter().all(|&a| a == 2)
    }

    pub fn validate(&self, c: &Combination) -> Result<()> {
        if c.0.len() != self.arities.len() {
            return Err(CboError::DimensionMismatch {
                expected: self.arities.len(),
                actual: c.0.len(),
            });
        }
        for (index, (&value, &arity)) in c.0.iter().zip(&self.arities).enumerate() {
            if value >= arity {
                return Err(CboError::CategoryOutOfRange { index, value, arity });
            }
        }
        Ok(())
    }

    pub fn rank(&self, c: &Combination) -> Result<u64> {
        self.validate(c)?;
        Ok(c.0
            .iter()
            .zip(&self.arities)
            .fold(0u64, |acc, (&v, &a)| acc * a as u64 + v as u64))
    }

    pub fn unrank(&self, rank: u64) -> Result<Combination> {
        if rank >= self.cardinality {
            return Err(CboError::OutOfImage {
                rank,
                cardinality: self.cardinality,
            });
        }
        let mut values = vec![0usize; self.arities.len()];
        let mut rest = rank;
        for (slot, &a) in values.iter_mut().zip(&self.arities).rev() {
            *slot = (rest % a as u64) as usize;
            rest /= a as u64;
        }
        Ok(Combination(values))
    }

    pub fn encode(&self, c: &Combination) -> Result<BooleanVector> {
        Ok(self.rank_to_bits(self.rank(c)?))
    }

    pub fn decode(&self, b: &BooleanVector) -> Result<Combination> {
        self.unrank(self.bits_to_rank(b)?)
    }

    /// Big-endian `m`-bit pattern of a rank. Does not check `rank < N`.
    pub fn rank_to_bits(&self, rank: u64) -> BooleanVector {
        let m = self.code_length;
        BooleanVector((0..m).map(|i| ((rank >> (m - 1 - i)) & 1) as u8).collect())
    }

    /// Integer value of a bit pattern. Does not check `rank < N`.
    pub fn bits_to_rank(&self, b: &BooleanVector) -> Result<u64> {
        if b.0.len() != self.code_length {
            return Err(CboError::DimensionMismatch {
                expected: self.code_length,
                actual: b.0.len(),
            });
        }
        Ok(b.0.iter().fold(0u64, |acc, &bit| (acc << 1) | u64::from(bit != 0)))
    }

    /// Decodes after folding an out-of-image pattern back with `rank mod N`.
    pub fn decode_clamped(&self, b: &BooleanVector) -> Result<Combination> {
        let rank = self.bits_to_rank(b)?;
        self.unrank(rank % self.cardinality)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Combination {
        let rank = rng.random_range(0..self.cardinality);
        self.unrank(rank).expect("sampled rank is below N")
    }

    /// All combinations in rank order.
    pub fn iter(&self) -> impl Iterator<Item = Combination> + '_ {
        (0..self.cardinality).map(move |r| self.unrank(r).expect("rank below N"))
    }
}

fn code_length_for(n: u64) -> usize {
    // smallest m with 2^m >= n
    if n <= 1 {
        0
    } else {
        (64 - (n - 1).leading_zeros()) as usize
    }
}

impl BooleanVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| f64::from(b)).collect()
    }

    /// Bits of an already-validated binary combination.
    pub fn from_binary_combination(c: &Combination) -> Self {
        BooleanVector(c.0.iter().map(|&v| v as u8).collect())
    }

    pub fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl std::fmt::Display for Combination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Combination {
    type Err = CboError;

    fn from_str(s: &str) -> Result<Self> {
        s.split(';')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|e| CboError::InvalidParameter(format!("bad combination {s:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Combination)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cardinality_and_code_length() {
        let s = CategoricalSpace::new(vec![3, 2]).unwrap();
        assert_eq!(s.cardinality(), 6);
        assert_eq!(s.code_length(), 3);
        let s = CategoricalSpace::binary(20).unwrap();
        assert_eq!(s.cardinality(), 1 << 20);
        assert_eq!(s.code_length(), 20);
        let s = CategoricalSpace::new(vec![3, 4, 5, 2]).unwrap();
        assert_eq!(s.cardinality(), 120);
        assert_eq!(s.code_length(), 7);
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(CategoricalSpace::new(vec![]).is_err());
        assert!(CategoricalSpace::new(vec![2, 1]).is_err());
        assert!(CategoricalSpace::new(vec![1 << 32, 1 << 32]).is_err());
    }

    #[test]
    fn encode_examples() {
        let s = CategoricalSpace::binary(3).unwrap();
        let b = s.encode(&Combination(vec![1, 0, 1])).unwrap();
        assert_eq!(b.0, vec![1, 0, 1]);
        assert_eq!(s.decode(&b).unwrap(), Combination(vec![1, 0, 1]));

        let s = CategoricalSpace::new(vec![3, 2]).unwrap();
        let c = Combination(vec![2, 1]);
        assert_eq!(s.rank(&c).unwrap(), 5);
        let b = s.encode(&c).unwrap();
        assert_eq!(b.0, vec![1, 0, 1]);
        assert_eq!(s.decode(&b).unwrap(), c);

        let s = CategoricalSpace::binary(20).unwrap();
        assert_eq!(s.encode(&Combination(vec![0; 20])).unwrap().0, vec![0; 20]);
    }

    #[test]
    fn decode_out_of_image() {
        let s = CategoricalSpace::new(vec![3, 2]).unwrap();
        let err = s.decode(&BooleanVector(vec![1, 1, 1])).unwrap_err();
        assert!(matches!(err, CboError::OutOfImage { rank: 7, cardinality: 6 }));
        assert_eq!(
            s.decode_clamped(&BooleanVector(vec![1, 1, 1])).unwrap(),
            s.unrank(1).unwrap()
        );
    }

    #[test]
    fn encode_dimension_errors() {
        let s = CategoricalSpace::new(vec![3, 2]).unwrap();
        assert!(matches!(
            s.encode(&Combination(vec![1])),
            Err(CboError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            s.encode(&Combination(vec![3, 0])),
            Err(CboError::CategoryOutOfRange { .. })
        ));
        assert!(s.decode(&BooleanVector(vec![1, 0])).is_err());
    }

    #[test]
    fn combination_text_form() {
        let c = Combination(vec![1, 0, 1]);
        assert_eq!(c.to_string(), "1;0;1");
        assert_eq!("1;0;1".parse::<Combination>().unwrap(), c);
    }

    proptest! {
        #[test]
        fn code_length_is_tight(arities in prop::collection::vec(2usize..7, 1..8)) {
            let s = CategoricalSpace::new(arities).unwrap();
            let n = s.cardinality();
            let m = s.code_length() as u32;
            prop_assert!(n <= 1u64 << m);
            prop_assert!(1u64 << (m - 1) < n);
        }

        #[test]
        fn encode_decode_roundtrip(arities in prop::collection::vec(2usize..6, 1..6), seed in any::<u64>()) {
            let s = CategoricalSpace::new(arities).unwrap();
            let mut rng = crate::rng::rng_from_seed(seed);
            let c = s.sample(&mut rng);
            let b = s.encode(&c).unwrap();
            prop_assert_eq!(b.len(), s.code_length());
            prop_assert!(s.bits_to_rank(&b).unwrap() < s.cardinality());
            prop_assert_eq!(s.decode(&b).unwrap(), c);
        }
    }
}
