//! Arithmetic over the binary extension fields GF(2^w), 1 <= w <= 16.
//!
//! Every field is backed by exp/log tables generated from a fixed primitive
//! polynomial. Tables are built once per width and shared process-wide, so a
//! [`FieldSpec`] is a cheap `Copy` handle and [`FieldSpec::field`] hands out a
//! `&'static Field`.
//!
//! Bulk code paths work on raw `u16` symbols (see [`Field::mul`] and the slice
//! helpers). The tagged [`Symbol`] type carries its field along and rejects
//! mixing symbols of different widths.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_WIDTH: u8 = 16;

/// Primitive polynomials indexed by width, low bits first (bit `w` is the
/// leading term). These are the conventional choices used by most erasure
/// coding libraries.
const PRIMITIVE_POLYS: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported field width {0}, expected 1..=16")]
    UnsupportedWidth(u8),
    #[error("value {value:#x} is not an element of GF(2^{width})")]
    NotInField { value: u32, width: u8 },
    #[error("symbols from different fields: GF(2^{0}) and GF(2^{1})")]
    FieldMismatch(u8, u8),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("reduction polynomial {poly:#x} is not primitive of degree {width}")]
    NotPrimitive { poly: u32, width: u8 },
}

/// Identifies GF(2^w) together with its reduction polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    width: u8,
    poly: u32,
}

impl FieldSpec {
    pub fn new(width: u8) -> Result<Self, FieldError> {
        if width == 0 || width > MAX_WIDTH {
            return Err(FieldError::UnsupportedWidth(width));
        }
        Ok(Self {
            width,
            poly: PRIMITIVE_POLYS[width as usize],
        })
    }

    /// Smallest field with more than `n` elements.
    pub fn exceeding(n: usize) -> Result<Self, FieldError> {
        let width = (1..=MAX_WIDTH)
            .find(|&w| (1usize << w) > n)
            .ok_or(FieldError::UnsupportedWidth(MAX_WIDTH + 1))?;
        Self::new(width)
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn reduction_polynomial(&self) -> u32 {
        self.poly
    }

    /// Number of elements, 2^w.
    pub fn order(&self) -> usize {
        1usize << self.width
    }

    pub fn field(&self) -> &'static Field {
        static FIELDS: [OnceLock<Field>; MAX_WIDTH as usize + 1] =
            [const { OnceLock::new() }; MAX_WIDTH as usize + 1];
        FIELDS[self.width as usize].get_or_init(|| {
            Field::build(*self).expect("built-in polynomial table is primitive")
        })
    }

    pub fn symbol(&self, value: u32) -> Result<Symbol, FieldError> {
        if value as usize >= self.order() {
            return Err(FieldError::NotInField {
                value,
                width: self.width,
            });
        }
        Ok(Symbol {
            field: *self,
            value: value as u16,
        })
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{})", self.width)
    }
}

/// Table-driven GF(2^w).
pub struct Field {
    spec: FieldSpec,
    // exp has 2*(order-1) entries so log sums never need reducing
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field").field("spec", &self.spec).finish()
    }
}

impl Field {
    fn build(spec: FieldSpec) -> Result<Self, FieldError> {
        let order = spec.order();
        let period = order - 1;
        let mut exp = vec![0u16; 2 * period];
        let mut log = vec![0u16; order];
        let mut seen = vec![false; order];
        let mut x: u32 = 1;
        for i in 0..period {
            // A repeat before the full period means x does not generate the
            // multiplicative group, i.e. the polynomial is not primitive.
            if seen[x as usize] {
                return Err(FieldError::NotPrimitive {
                    poly: spec.poly,
                    width: spec.width,
                });
            }
            seen[x as usize] = true;
            exp[i] = x as u16;
            exp[i + period] = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << spec.width) != 0 {
                x ^= spec.poly;
            }
        }
        if x != 1 {
            return Err(FieldError::NotPrimitive {
                poly: spec.poly,
                width: spec.width,
            });
        }
        Ok(Self { spec, exp, log })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
    }

    pub fn inv(&self, a: u16) -> Result<u16, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        let period = self.spec.order() - 1;
        Ok(self.exp[(period - self.log[a as usize] as usize) % period])
    }

    pub fn div(&self, a: u16, b: u16) -> Result<u16, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` with `0^0 = 1`.
    pub fn pow(&self, a: u16, e: u32) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let period = (self.spec.order() - 1) as u64;
        let l = (self.log[a as usize] as u64 * e as u64) % period;
        self.exp[l as usize]
    }

    /// `dst[i] += c * src[i]`.
    pub fn mul_add_slice(&self, dst: &mut [u16], src: &[u16], c: u16) {
        debug_assert_eq!(dst.len(), src.len());
        match c {
            0 => {}
            1 => add_slice(dst, src),
            _ => {
                let lc = self.log[c as usize] as usize;
                for (d, &s) in dst.iter_mut().zip(src) {
                    if s != 0 {
                        *d ^= self.exp[lc + self.log[s as usize] as usize];
                    }
                }
            }
        }
    }
}

/// `dst[i] += src[i]`; addition is XOR in every field of characteristic 2.
pub fn add_slice(dst: &mut [u16], src: &[u16]) {
    debug_assert_eq!(dst.len(), src.len());
    for (d, &s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// A field element tagged with the field it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol {
    field: FieldSpec,
    value: u16,
}

impl Symbol {
    pub fn value(&self) -> u16 {
        self.value
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    fn same_field(&self, other: &Symbol) -> Result<&'static Field, FieldError> {
        if self.field != other.field {
            return Err(FieldError::FieldMismatch(
                self.field.width,
                other.field.width,
            ));
        }
        Ok(self.field.field())
    }

    pub fn checked_add(self, other: Symbol) -> Result<Symbol, FieldError> {
        let f = self.same_field(&other)?;
        Ok(Symbol {
            field: self.field,
            value: f.add(self.value, other.value),
        })
    }

    pub fn checked_mul(self, other: Symbol) -> Result<Symbol, FieldError> {
        let f = self.same_field(&other)?;
        Ok(Symbol {
            field: self.field,
            value: f.mul(self.value, other.value),
        })
    }

    pub fn inv(self) -> Result<Symbol, FieldError> {
        Ok(Symbol {
            field: self.field,
            value: self.field.field().inv(self.value)?,
        })
    }
}
