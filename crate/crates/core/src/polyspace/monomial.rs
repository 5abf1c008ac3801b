use serde::Serialize;

use crate::{Error, Result};

/// Multi-indices of total degree `t` in `n` variables, in graded colex order.
///
/// An exponent vector is written as the sorted variable list
/// `c_1 <= ... <= c_t`; with `d_m = c_m + m - 1` its position is
/// `sum_m C(d_m, m)`. For `n = 3, t = 2` this gives
/// `X1^2, X1X2, X2^2, X1X3, X2X3, X3^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    degree: usize,
    exponents: Vec<u16>,
    binom: Vec<usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, degree: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let binom = pascal(n + degree, degree + 1);
        let size = binomial(n + degree - 1, degree);
        let mut exponents = vec![0u16; size * n];
        // Colex successor on strictly increasing d, mapped back to exponents.
        let mut d: Vec<usize> = (0..degree).collect();
        for slot in 0..size {
            let row = &mut exponents[slot * n..(slot + 1) * n];
            for (m, &dm) in d.iter().enumerate() {
                row[dm - m] += 1;
            }
            let upper = n + degree - 1;
            if let Some(m) = (0..degree).find(|&m| {
                let next = if m + 1 < degree { d[m + 1] } else { upper };
                d[m] + 1 < next
            }) {
                d[m] += 1;
                for (i, v) in d.iter_mut().take(m).enumerate() {
                    *v = i;
                }
            }
        }
        Ok(Self { n, degree, exponents, binom })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponent(&self, index: usize) -> &[u16] {
        &self.exponents[index * self.n..(index + 1) * self.n]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[u16]> + '_ {
        self.exponents.chunks_exact(self.n)
    }

    pub fn index_of(&self, alpha: &[u16]) -> Option<usize> {
        if alpha.len() != self.n || alpha.iter().map(|&a| a as usize).sum::<usize>() != self.degree {
            return None;
        }
        Some(self.rank_unchecked(alpha.iter().map(|&a| a as usize)))
    }

    /// Index of `alpha + beta` where both are given by their exponent vectors.
    pub fn index_of_sum(&self, alpha: &[u16], beta: &[u16]) -> Option<usize> {
        if alpha.len() != self.n || beta.len() != self.n {
            return None;
        }
        let total: usize = alpha.iter().chain(beta).map(|&a| a as usize).sum();
        if total != self.degree {
            return None;
        }
        Some(self.rank_unchecked(alpha.iter().zip(beta).map(|(&a, &b)| (a + b) as usize)))
    }

    /// Index of `alpha - e_j`, where `alpha` has degree `self.degree + 1`.
    pub fn index_of_lowered(&self, alpha: &[u16], j: usize) -> Option<usize> {
        if alpha.len() != self.n || alpha[j] == 0 {
            return None;
        }
        let total: usize = alpha.iter().map(|&a| a as usize).sum();
        if total != self.degree + 1 {
            return None;
        }
        Some(self.rank_unchecked(alpha.iter().enumerate().map(|(i, &a)| a as usize - usize::from(i == j))))
    }

    fn rank_unchecked(&self, alpha: impl Iterator<Item = usize>) -> usize {
        let stride = self.degree + 2;
        let mut rank = 0;
        let mut m = 0;
        for (j, a) in alpha.enumerate() {
            for _ in 0..a {
                rank += self.binom[(j + m) * stride + m + 1];
                m += 1;
            }
        }
        rank
    }

    pub fn descriptor(&self) -> BasisDescriptor {
        BasisDescriptor { n: self.n, degree: self.degree, order: "graded-colex", size: self.len() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisDescriptor {
    pub n: usize,
    pub degree: usize,
    pub order: &'static str,
    pub size: usize,
}

pub fn monomial_basis(n: usize, t: usize) -> Result<MonomialBasis> {
    MonomialBasis::new(n, t)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn pascal(rows: usize, cols: usize) -> Vec<usize> {
    let stride = cols + 1;
    let mut table = vec![0usize; (rows + 1) * stride];
    for a in 0..=rows {
        table[a * stride] = 1;
        for b in 1..=cols.min(a) {
            table[a * stride + b] = table[(a - 1) * stride + b - 1] + table[(a - 1) * stride + b];
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sizes() {
        assert_eq!(MonomialBasis::new(3, 2).unwrap().len(), 6);
        assert_eq!(MonomialBasis::new(6, 6).unwrap().len(), 462);
        let single = MonomialBasis::new(1, 5).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.exponent(0), &[5]);
        let constant = MonomialBasis::new(4, 0).unwrap();
        assert_eq!(constant.len(), 1);
        assert_eq!(constant.exponent(0), &[0, 0, 0, 0]);
        assert!(MonomialBasis::new(0, 2).is_err());
    }

    #[test]
    fn colex_order_n3_t2() {
        let b = MonomialBasis::new(3, 2).unwrap();
        let got: Vec<&[u16]> = b.iter().collect();
        let want: [&[u16]; 6] = [&[2, 0, 0], &[1, 1, 0], &[0, 2, 0], &[1, 0, 1], &[0, 1, 1], &[0, 0, 2]];
        assert_eq!(got, want);
    }

    #[test]
    fn lowered_and_sum_indices() {
        let b3 = MonomialBasis::new(3, 3).unwrap();
        let b2 = MonomialBasis::new(3, 2).unwrap();
        for alpha in b3.iter() {
            for j in 0..3 {
                let got = b2.index_of_lowered(alpha, j);
                if alpha[j] == 0 {
                    assert_eq!(got, None);
                } else {
                    let mut lowered = alpha.to_vec();
                    lowered[j] -= 1;
                    assert_eq!(got, b2.index_of(&lowered));
                }
            }
        }
        assert_eq!(b3.index_of_sum(&[1, 0, 0], &[0, 1, 1]), b3.index_of(&[1, 1, 1]));
        assert_eq!(b3.index_of(&[1, 1, 0]), None);
    }

    proptest! {
        #[test]
        fn index_roundtrip(n in 1usize..7, t in 0usize..7) {
            let b = MonomialBasis::new(n, t).unwrap();
            prop_assert_eq!(b.len(), binomial(n + t - 1, t));
            let mut seen = std::collections::HashSet::new();
            for (i, alpha) in b.iter().enumerate() {
                prop_assert_eq!(alpha.iter().map(|&a| a as usize).sum::<usize>(), t);
                prop_assert_eq!(b.index_of(alpha), Some(i));
                prop_assert!(seen.insert(alpha.to_vec()));
            }
        }

        #[test]
        fn construction_is_deterministic(n in 1usize..6, t in 0usize..6) {
            prop_assert_eq!(MonomialBasis::new(n, t).unwrap(), MonomialBasis::new(n, t).unwrap());
        }
    }
}
