use std::fmt;
use std::sync::Arc;

use crate::code::ArrayCode;
use crate::field::FieldSpec;

use super::PirError;

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(B, S) = ((N-K)/gcd(N,K), K/gcd(N,K))`.
pub fn sub_stripe_dims(n: usize, k: usize) -> Result<(usize, usize), PirError> {
    if k == 0 || n <= k {
        return Err(PirError::InvalidParams(format!(
            "need N > K >= 1, got N={n}, K={k}"
        )));
    }
    let g = gcd(n, k);
    Ok(((n - k) / g, k / g))
}

/// Everything both sides of the protocol agree on up front.
#[derive(Clone)]
pub struct SystemParams {
    n: usize,
    k: usize,
    alpha: usize,
    m: usize,
    b: usize,
    s: usize,
    code: Arc<dyn ArrayCode>,
}

impl fmt::Debug for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemParams")
            .field("n", &self.n)
            .field("k", &self.k)
            .field("alpha", &self.alpha)
            .field("m", &self.m)
            .field("b", &self.b)
            .field("s", &self.s)
            .field("code", &self.code.descriptor().to_string())
            .finish()
    }
}

impl SystemParams {
    /// Checks that `code` is an `(n, k, alpha)` code and derives `B`, `S`.
    pub fn derive(
        n: usize,
        k: usize,
        alpha: usize,
        m: usize,
        code: Arc<dyn ArrayCode>,
    ) -> Result<Self, PirError> {
        let (b, s) = sub_stripe_dims(n, k)?;
        if m == 0 {
            return Err(PirError::InvalidParams("need at least one file".into()));
        }
        let cp = *code.params();
        if (cp.n, cp.k, cp.alpha) != (n, k, alpha) {
            return Err(PirError::CodeMismatch {
                n,
                k,
                alpha,
                got_n: cp.n,
                got_k: cp.k,
                got_alpha: cp.alpha,
            });
        }
        Ok(Self {
            n,
            k,
            alpha,
            m,
            b,
            s,
            code,
        })
    }

    /// Parameters taken from the code itself.
    pub fn for_code(code: Arc<dyn ArrayCode>, m: usize) -> Result<Self, PirError> {
        let cp = *code.params();
        Self::derive(cp.n, cp.k, cp.alpha, m, code)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// Number of files.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Sub-stripes per file.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Columns of the query matrix.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Size of the row-index domain, `B + S`.
    pub fn zone(&self) -> usize {
        self.b + self.s
    }

    /// File length in symbols, `alpha * B * K`.
    pub fn file_len(&self) -> usize {
        self.alpha * self.b * self.k
    }

    pub fn field(&self) -> FieldSpec {
        self.code.params().field
    }

    pub fn code(&self) -> &Arc<dyn ArrayCode> {
        &self.code
    }

    /// Number of ordered `S`-tuples of distinct values in `[0, B+S)`.
    pub fn row_choices(&self) -> u128 {
        ((self.b + 1)..=self.zone()).map(|v| v as u128).product()
    }

    /// `|Omega|`, or `None` if it overflows `u128`.
    pub fn omega_size(&self) -> Option<u128> {
        self.row_choices().checked_pow(self.m as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::StackedReedSolomon;

    fn rs(n: usize, k: usize, alpha: usize) -> Arc<dyn ArrayCode> {
        Arc::new(StackedReedSolomon::new(n, k, alpha, FieldSpec::exceeding(n).unwrap()).unwrap())
    }

    #[test]
    fn sub_stripe_dimensions() {
        assert_eq!(sub_stripe_dims(5, 3).unwrap(), (2, 3));
        assert_eq!(sub_stripe_dims(4, 2).unwrap(), (1, 1));
        assert_eq!(sub_stripe_dims(7, 3).unwrap(), (4, 3));
        assert_eq!(sub_stripe_dims(6, 4).unwrap(), (1, 2));
        assert!(sub_stripe_dims(3, 3).is_err());
        assert!(sub_stripe_dims(3, 0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let p = SystemParams::derive(5, 3, 2, 2, rs(5, 3, 2)).unwrap();
        assert_eq!((p.b(), p.s(), p.zone(), p.file_len()), (2, 3, 5, 12));
        assert_eq!(p.omega_size(), Some(3600));
        let p = SystemParams::derive(4, 2, 1, 3, rs(4, 2, 1)).unwrap();
        assert_eq!(p.omega_size(), Some(8));
    }

    #[test]
    fn rejects_mismatch_and_degenerate() {
        assert!(matches!(
            SystemParams::derive(5, 3, 1, 2, rs(5, 3, 2)),
            Err(PirError::CodeMismatch { .. })
        ));
        assert!(SystemParams::derive(5, 3, 2, 0, rs(5, 3, 2)).is_err());
        assert!(SystemParams::derive(5, 5, 2, 1, rs(5, 3, 2)).is_err());
        assert!(SystemParams::for_code(rs(5, 3, 2), 1).is_ok());
    }
}
