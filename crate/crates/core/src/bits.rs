//! Big-endian bit packing of `w`-bit symbols.

/// Appends bits MSB-first into a byte vector.
#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Writes the low `width` bits of `value`, most significant first.
    pub fn write(&mut self, value: u32, width: u32) {
        for bit in (0..width).rev() {
            if self.used.is_multiple_of(8) {
                self.bytes.push(0);
            }
            if (value >> bit) & 1 == 1 {
                let last = self.bytes.last_mut().expect("pushed above");
                *last |= 0x80 >> (self.used % 8);
            }
            self.used += 1;
        }
    }

    pub fn bits_written(&self) -> u64 {
        self.used as u64
    }

    /// Final bytes; the last byte is zero-padded.
    pub fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub fn read(&mut self, width: u32) -> Option<u32> {
        if self.pos + width as usize > self.bytes.len() * 8 {
            return None;
        }
        let mut v = 0u32;
        for _ in 0..width {
            let byte = self.bytes[self.pos / 8];
            let bit = (byte >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | bit as u32;
            self.pos += 1;
        }
        Some(v)
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() * 8 - self.pos
    }
}

pub fn pack_symbols(symbols: &[u16], width: u8) -> Vec<u8> {
    let mut w = BitWriter::new();
    for &s in symbols {
        w.write(s as u32, width as u32);
    }
    w.finish()
}

/// Reads `count` symbols; `None` if `bytes` is too short.
pub fn unpack_symbols(bytes: &[u8], width: u8, count: usize) -> Option<Vec<u16>> {
    let mut r = BitReader::new(bytes);
    (0..count).map(|_| r.read(width as u32).map(|v| v as u16)).collect()
}

/// Splits a byte string into `count` symbols of `width` bits, zero-padding
/// the tail. `None` if the bytes do not fit.
pub fn bytes_to_symbols(bytes: &[u8], width: u8, count: usize) -> Option<Vec<u16>> {
    if bytes.len() * 8 > count * width as usize {
        return None;
    }
    let mut padded = bytes.to_vec();
    padded.resize((count * width as usize).div_ceil(8), 0);
    unpack_symbols(&padded, width, count)
}

/// Whole bytes that `count` symbols of `width` bits can carry.
pub fn byte_capacity(width: u8, count: usize) -> usize {
    count * width as usize / 8
}

/// Inverse of [`bytes_to_symbols`]: the leading whole bytes of the bit
/// stream.
pub fn symbols_to_bytes(symbols: &[u16], width: u8) -> Vec<u8> {
    let mut bytes = pack_symbols(symbols, width);
    bytes.truncate(byte_capacity(width, symbols.len()));
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_bit_symbols_big_endian() {
        // 101 011 001(0000000)
        assert_eq!(pack_symbols(&[5, 3, 1], 3), vec![0b1010_1100, 0b1000_0000]);
        assert_eq!(pack_symbols(&[5, 3, 4], 3), vec![0b1010_1110, 0]);
        assert_eq!(unpack_symbols(&[0b1010_1110, 0], 3, 3), Some(vec![5, 3, 4]));
        assert_eq!(unpack_symbols(&[0xff], 3, 3), None);
    }

    #[test]
    fn byte_framing() {
        assert_eq!(bytes_to_symbols(&[0xAB], 4, 3), Some(vec![0xA, 0xB, 0]));
        assert_eq!(bytes_to_symbols(&[1, 2], 4, 3), None);
        assert_eq!(symbols_to_bytes(&[0xA, 0xB, 0], 4), vec![0xAB]);
        assert_eq!(byte_capacity(1, 4), 0);
    }

    proptest! {
        #[test]
        fn bytes_survive_symbol_round_trip(
            width in 1u8..=16,
            bytes in proptest::collection::vec(any::<u8>(), 0..64),
            extra in 0usize..20,
        ) {
            let count = (bytes.len() * 8).div_ceil(width as usize) + extra;
            let symbols = bytes_to_symbols(&bytes, width, count).unwrap();
            prop_assert!(symbols.iter().all(|&s| (s as u32) < (1u32 << width)));
            let back = symbols_to_bytes(&symbols, width);
            prop_assert_eq!(&back[..bytes.len()], &bytes[..]);
            prop_assert!(back[bytes.len()..].iter().all(|&b| b == 0));
        }
    }
}
