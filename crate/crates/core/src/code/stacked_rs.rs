use crate::field::FieldSpec;
use crate::matrix::Matrix;

use super::{ArrayCode, CodeDescriptor, CodeError, CodeParams, GeneratorMatrix};

/// `alpha` systematic Reed-Solomon codewords stacked row-wise.
///
/// The scalar code evaluates at the points `0, 1, ..., N-1` (read as field
/// elements) and is brought to systematic form by inverting the leftmost
/// `K x K` Vandermonde block. Every `alpha x alpha` block of the array
/// generator is then a scalar multiple of the identity, so each of the
/// `alpha` rows is an independent `[N, K]` MDS codeword.
#[derive(Debug, Clone)]
pub struct StackedReedSolomon {
    scalar: Matrix,
    generator: GeneratorMatrix,
}

impl StackedReedSolomon {
    pub fn new(n: usize, k: usize, alpha: usize, field: FieldSpec) -> Result<Self, CodeError> {
        let params = CodeParams::new(n, k, alpha, field)?;
        if field.order() <= n {
            return Err(CodeError::FieldTooSmall {
                width: field.width(),
                order: field.order(),
                n,
            });
        }
        let f = field.field();
        let mut vandermonde = Matrix::zeros(k, n);
        for r in 0..k {
            for c in 0..n {
                vandermonde.set(r, c, f.pow(c as u16, r as u32));
            }
        }
        let left: Vec<usize> = (0..k).collect();
        let left_inv = vandermonde
            .select_columns(&left)
            .inverse(f)
            .ok_or_else(|| CodeError::Singular(left.clone()))?;
        let scalar = left_inv.mul(&vandermonde, f);

        let mut full = Matrix::zeros(k * alpha, n * alpha);
        for r in 0..k {
            for c in 0..n {
                let g = scalar.get(r, c);
                for a in 0..alpha {
                    full.set(r * alpha + a, c * alpha + a, g);
                }
            }
        }
        Ok(Self {
            scalar,
            generator: GeneratorMatrix::new(params, full)?,
        })
    }

    /// The `K x N` systematic scalar generator.
    pub fn scalar_generator(&self) -> &Matrix {
        &self.scalar
    }
}

impl ArrayCode for StackedReedSolomon {
    fn params(&self) -> &CodeParams {
        self.generator.params()
    }

    fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    fn descriptor(&self) -> CodeDescriptor {
        let p = self.params();
        CodeDescriptor::StackedRs {
            n: p.n,
            k: p.k,
            alpha: p.alpha,
            w: p.field.width(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::Stripe;
    use itertools::Itertools;

    /// Determinant by cofactor expansion, independent of Gauss-Jordan.
    fn det(m: &[Vec<u16>], f: &crate::field::Field) -> u16 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut acc = 0u16;
        for c in 0..n {
            let minor: Vec<Vec<u16>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &v)| v).collect())
                .collect();
            // signs vanish in characteristic 2
            acc ^= f.mul(m[0][c], det(&minor, f));
        }
        acc
    }

    #[test]
    fn scalar_rs_5_3_all_subsets_nonsingular() {
        let spec = FieldSpec::new(3).unwrap();
        let code = StackedReedSolomon::new(5, 3, 1, spec).unwrap();
        let g = code.scalar_generator();
        let mut count = 0;
        for cols in (0..5).combinations(3) {
            let sub: Vec<Vec<u16>> = (0..3)
                .map(|r| cols.iter().map(|&c| g.get(r, c)).collect())
                .collect();
            assert_ne!(det(&sub, spec.field()), 0, "{cols:?}");
            count += 1;
        }
        assert_eq!(count, 10);
        assert!(code.generator().is_mds());
    }

    #[test]
    fn array_4_2_2_is_mds() {
        let code = StackedReedSolomon::new(4, 2, 2, FieldSpec::new(3).unwrap()).unwrap();
        assert_eq!(code.generator().singular_subsets(), Vec::<Vec<usize>>::new());
        // every block is a scalar multiple of the identity
        for r in 0..2 {
            for c in 0..4 {
                let b = code.generator().block(r, c);
                assert_eq!(b.get(0, 1), 0);
                assert_eq!(b.get(1, 0), 0);
                assert_eq!(b.get(0, 0), b.get(1, 1));
            }
        }
    }

    #[test]
    fn unit_vector_encodes_to_generator_row() {
        let code = StackedReedSolomon::new(5, 3, 1, FieldSpec::new(3).unwrap()).unwrap();
        let cw = code.encode_stripe(&Stripe::new(1, vec![1, 0, 0])).unwrap();
        assert_eq!(cw.as_slice(), code.scalar_generator().row(0));
    }

    #[test]
    fn field_must_exceed_n() {
        let gf2 = FieldSpec::new(1).unwrap();
        assert!(matches!(
            StackedReedSolomon::new(5, 3, 1, gf2),
            Err(CodeError::FieldTooSmall { .. })
        ));
        let gf4 = FieldSpec::new(2).unwrap();
        assert!(StackedReedSolomon::new(4, 2, 1, gf4).is_err());
        assert!(StackedReedSolomon::new(3, 2, 1, gf4).is_ok());
    }

    #[test]
    fn invalid_shapes() {
        let spec = FieldSpec::new(4).unwrap();
        assert!(StackedReedSolomon::new(3, 3, 1, spec).is_err());
        assert!(StackedReedSolomon::new(3, 0, 1, spec).is_err());
        assert!(StackedReedSolomon::new(3, 2, 0, spec).is_err());
    }
}
