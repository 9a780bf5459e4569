use crate::field::FieldSpec;
use crate::matrix::Matrix;

use super::{ArrayCode, CodeDescriptor, CodeError, CodeParams, GeneratorMatrix};

/// EVENODD over GF(2): `K <= p` data columns, one row-parity column and one
/// diagonal-parity column, `p - 1` bits per column, `p` an odd prime.
///
/// With data bits `a[i][j]` (`a[p-1][j] = 0`, and `a[i][j] = 0` for
/// `K <= j < p`), the parities are
///
/// ```text
/// P[i] = sum_j a[i][j]
/// S    = sum_{j=1}^{p-1} a[p-1-j][j]
/// Q[i] = S + sum_j a[(i - j) mod p][j]
/// ```
#[derive(Debug, Clone)]
pub struct EvenOdd {
    p: usize,
    generator: GeneratorMatrix,
}

pub(crate) fn is_odd_prime(p: usize) -> bool {
    p >= 3 && p % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl EvenOdd {
    pub fn new(k: usize, p: usize) -> Result<Self, CodeError> {
        if !is_odd_prime(p) {
            return Err(CodeError::NotPrime(p));
        }
        if k == 0 || k > p {
            return Err(CodeError::InvalidParams(format!(
                "EVENODD needs 1 <= K <= p, got K={k}, p={p}"
            )));
        }
        let alpha = p - 1;
        let n = k + 2;
        let params = CodeParams::new(n, k, alpha, FieldSpec::new(1)?)?;
        let (row_parity, diag_parity) = (k, k + 1);

        let mut g = Matrix::zeros(k * alpha, n * alpha);
        let toggle = |g: &mut Matrix, r: usize, c: usize| g.set(r, c, g.get(r, c) ^ 1);
        for j in 0..k {
            for r in 0..alpha {
                let input = j * alpha + r;
                g.set(input, j * alpha + r, 1);
                toggle(&mut g, input, row_parity * alpha + r);
                // a[r][j] lies on diagonal (r + j) mod p
                let diag = (r + j) % p;
                if diag == p - 1 {
                    // the adjuster S feeds every Q[i]
                    for i in 0..alpha {
                        toggle(&mut g, input, diag_parity * alpha + i);
                    }
                } else {
                    toggle(&mut g, input, diag_parity * alpha + diag);
                }
            }
        }
        Ok(Self {
            p,
            generator: GeneratorMatrix::new(params, g)?,
        })
    }

    pub fn prime(&self) -> usize {
        self.p
    }
}

impl ArrayCode for EvenOdd {
    fn params(&self) -> &CodeParams {
        self.generator.params()
    }

    fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    fn descriptor(&self) -> CodeDescriptor {
        CodeDescriptor::EvenOdd {
            k: self.params().k,
            p: self.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Stripe;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Textbook EVENODD parity over a 2-D bit array.
    fn evenodd_parity(a: &[Vec<u16>], k: usize, p: usize) -> (Vec<u16>, Vec<u16>) {
        let bit = |i: usize, j: usize| if i == p - 1 || j >= k { 0 } else { a[j][i] };
        let mut row = vec![0; p - 1];
        let mut diag = vec![0; p - 1];
        let mut s = 0;
        for j in 1..p {
            s ^= bit(p - 1 - j, j);
        }
        for i in 0..p - 1 {
            for j in 0..p {
                row[i] ^= bit(i, j);
                diag[i] ^= bit((i + p - j) % p, j);
            }
            diag[i] ^= s;
        }
        (row, diag)
    }

    #[test]
    fn parity_matches_textbook_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (k, p) in [(3, 5), (2, 3), (5, 5), (4, 7), (3, 3)] {
            let code = EvenOdd::new(k, p).unwrap();
            for _ in 0..50 {
                let cols: Vec<Vec<u16>> = (0..k)
                    .map(|_| (0..p - 1).map(|_| rng.random_range(0..2)).collect())
                    .collect();
                let cw = code.encode_stripe(&Stripe::from_blocks(&cols)).unwrap();
                let (row, diag) = evenodd_parity(&cols, k, p);
                assert_eq!(cw.block(k), &row[..]);
                assert_eq!(cw.block(k + 1), &diag[..]);
                // row parity is the XOR of the data columns
                for i in 0..p - 1 {
                    let x = cols.iter().fold(0, |acc, c| acc ^ c[i]);
                    assert_eq!(cw.block(k)[i], x);
                }
            }
        }
    }

    #[test]
    fn k3_p5_is_binary_5_3_4_mds() {
        let code = EvenOdd::new(3, 5).unwrap();
        let p = code.params();
        assert_eq!((p.n, p.k, p.alpha, p.field.width()), (5, 3, 4, 1));
        assert!(code.generator().is_mds());
        assert_eq!((0..5).combinations(3).count(), 10);
    }

    #[test]
    fn k2_p3_is_binary_4_2_2_mds() {
        let code = EvenOdd::new(2, 3).unwrap();
        let p = code.params();
        assert_eq!((p.n, p.k, p.alpha), (4, 2, 2));
        assert!(code.generator().is_mds());
    }

    #[test]
    fn rejects_bad_primes_and_widths() {
        assert_eq!(EvenOdd::new(4, 4).unwrap_err(), CodeError::NotPrime(4));
        assert_eq!(EvenOdd::new(2, 2).unwrap_err(), CodeError::NotPrime(2));
        assert!(matches!(EvenOdd::new(6, 5), Err(CodeError::InvalidParams(_))));
        assert!(is_odd_prime(13) && !is_odd_prime(9) && !is_odd_prime(1));
    }
}
