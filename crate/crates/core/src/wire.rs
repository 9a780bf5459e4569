//! Bit-exact message formats.
//!
//! Query (both [`QueryMatrix`] and [`ServerQuery`]):
//!
//! ```text
//! u8      format tag, QUERY_FORMAT_V1
//! u32 BE  M
//! u32 BE  S
//! u32 BE  entries, M*S of them, row-major
//! ```
//!
//! Response:
//!
//! ```text
//! u8      format tag, RESPONSE_FORMAT_V1
//! u32 BE  S
//! u32 BE  alpha
//! u8      w
//! bits    S presence bits, column 0 first
//! bits    present blocks in column order, each symbol w bits, MSB first
//! bits    zero padding to a byte boundary
//! ```
//!
//! Presence bits and padding start right after the `w` byte and share one
//! MSB-first bit stream with the symbols.

use thiserror::Error;

use crate::bits::{BitReader, BitWriter};
use crate::pir::{PirError, QueryMatrix, Response, ServerQuery, SystemParams};

pub const QUERY_FORMAT_V1: u8 = 0x01;
pub const RESPONSE_FORMAT_V1: u8 = 0x02;

const QUERY_HEADER: usize = 1 + 4 + 4;
const RESPONSE_HEADER: usize = 1 + 4 + 4 + 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("unknown format tag {0:#04x}")]
    UnknownFormat(u8),
    #[error("message truncated")]
    Truncated,
    #[error("{0} trailing bytes after message")]
    TrailingBytes(usize),
    #[error("nonzero padding bits")]
    NonZeroPadding,
    #[error("header field {field} = {got}, expected {expected}")]
    HeaderMismatch {
        field: &'static str,
        got: u64,
        expected: u64,
    },
    #[error(transparent)]
    Invalid(#[from] PirError),
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, WireError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
        .ok_or(WireError::Truncated)
}

fn encode_matrix(m: usize, s: usize, entries: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(QUERY_HEADER + 4 * entries.len());
    out.push(QUERY_FORMAT_V1);
    out.extend_from_slice(&(m as u32).to_be_bytes());
    out.extend_from_slice(&(s as u32).to_be_bytes());
    for &e in entries {
        out.extend_from_slice(&(e as u32).to_be_bytes());
    }
    out
}

fn decode_matrix(bytes: &[u8], params: &SystemParams) -> Result<Vec<usize>, WireError> {
    let tag = *bytes.first().ok_or(WireError::Truncated)?;
    if tag != QUERY_FORMAT_V1 {
        return Err(WireError::UnknownFormat(tag));
    }
    let m = read_u32(bytes, 1)? as u64;
    let s = read_u32(bytes, 5)? as u64;
    for (field, got, expected) in [("M", m, params.m() as u64), ("S", s, params.s() as u64)] {
        if got != expected {
            return Err(WireError::HeaderMismatch { field, got, expected });
        }
    }
    let count = (m * s) as usize;
    let end = QUERY_HEADER + 4 * count;
    if bytes.len() < end {
        return Err(WireError::Truncated);
    }
    if bytes.len() > end {
        return Err(WireError::TrailingBytes(bytes.len() - end));
    }
    (0..count)
        .map(|i| read_u32(bytes, QUERY_HEADER + 4 * i).map(|v| v as usize))
        .collect()
}

pub fn encode_query_matrix(q: &QueryMatrix) -> Vec<u8> {
    encode_matrix(q.rows(), q.cols(), q.entries())
}

pub fn decode_query_matrix(bytes: &[u8], params: &SystemParams) -> Result<QueryMatrix, WireError> {
    Ok(QueryMatrix::from_entries(params, decode_matrix(bytes, params)?)?)
}

pub fn encode_server_query(sq: &ServerQuery) -> Vec<u8> {
    encode_matrix(sq.rows(), sq.cols(), sq.entries())
}

/// Parses a query as received by `server`.
pub fn decode_server_query(
    bytes: &[u8],
    server: usize,
    params: &SystemParams,
) -> Result<ServerQuery, WireError> {
    Ok(ServerQuery::from_entries(params, server, decode_matrix(bytes, params)?)?)
}

pub fn encode_response(resp: &Response, width: u8) -> Vec<u8> {
    let s = resp.present().len();
    let mut out = Vec::with_capacity(RESPONSE_HEADER + (s + resp.symbol_count() * width as usize).div_ceil(8));
    out.push(RESPONSE_FORMAT_V1);
    out.extend_from_slice(&(s as u32).to_be_bytes());
    out.extend_from_slice(&(resp.alpha() as u32).to_be_bytes());
    out.push(width);
    let mut bits = BitWriter::new();
    for &p in resp.present() {
        bits.write(p as u32, 1);
    }
    for &sym in resp.symbols() {
        bits.write(sym as u32, width as u32);
    }
    out.extend_from_slice(&bits.finish());
    out
}

/// A decoded response together with its wire cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedResponse {
    pub response: Response,
    pub width: u8,
    /// Every bit of the message that is not a payload symbol.
    pub overhead_bits: u64,
}

pub fn decode_response(bytes: &[u8]) -> Result<DecodedResponse, WireError> {
    let tag = *bytes.first().ok_or(WireError::Truncated)?;
    if tag != RESPONSE_FORMAT_V1 {
        return Err(WireError::UnknownFormat(tag));
    }
    let s = read_u32(bytes, 1)? as usize;
    let alpha = read_u32(bytes, 5)? as usize;
    let width = *bytes.get(9).ok_or(WireError::Truncated)?;
    if width == 0 || width > 16 {
        return Err(WireError::HeaderMismatch {
            field: "w",
            got: width as u64,
            expected: 16,
        });
    }
    let body = &bytes[RESPONSE_HEADER..];
    let mut r = BitReader::new(body);
    let present: Vec<bool> = (0..s)
        .map(|_| r.read(1).map(|b| b == 1))
        .collect::<Option<_>>()
        .ok_or(WireError::Truncated)?;
    let count = alpha * present.iter().filter(|&&p| p).count();
    let symbols: Vec<u16> = (0..count)
        .map(|_| r.read(width as u32).map(|v| v as u16))
        .collect::<Option<_>>()
        .ok_or(WireError::Truncated)?;
    let used_bits = s + count * width as usize;
    let expected_len = used_bits.div_ceil(8);
    if body.len() > expected_len {
        return Err(WireError::TrailingBytes(body.len() - expected_len));
    }
    while r.remaining() > 0 {
        if r.read(1) != Some(0) {
            return Err(WireError::NonZeroPadding);
        }
    }
    let overhead_bits = (bytes.len() * 8 - count * width as usize) as u64;
    Ok(DecodedResponse {
        response: Response::new(alpha, present, symbols)?,
        width,
        overhead_bits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::StackedReedSolomon;
    use crate::field::FieldSpec;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn params() -> SystemParams {
        let code = StackedReedSolomon::new(5, 3, 2, FieldSpec::new(3).unwrap()).unwrap();
        SystemParams::for_code(Arc::new(code), 2).unwrap()
    }

    #[test]
    fn query_layout_is_exact() {
        let p = params();
        let q = QueryMatrix::from_rows(&p, &[[0, 2, 4], [1, 3, 0]]).unwrap();
        let bytes = encode_query_matrix(&q);
        let mut expected = vec![0x01, 0, 0, 0, 2, 0, 0, 0, 3];
        for e in [0u32, 2, 4, 1, 3, 0] {
            expected.extend_from_slice(&e.to_be_bytes());
        }
        assert_eq!(bytes, expected);
        assert_eq!(decode_query_matrix(&bytes, &p).unwrap(), q);
        let sq = q.server_query(0, 2, &p).unwrap();
        assert_eq!(decode_server_query(&encode_server_query(&sq), 2, &p).unwrap(), sq);
    }

    #[test]
    fn response_layout_is_exact() {
        // S = 3, alpha = 2, w = 3, present = 101, blocks (5, 1) and (7, 2)
        let resp = Response::new(2, vec![true, false, true], vec![5, 1, 7, 2]).unwrap();
        let bytes = encode_response(&resp, 3);
        // 101 | 101 001 111 010 | 0
        assert_eq!(
            bytes,
            vec![0x02, 0, 0, 0, 3, 0, 0, 0, 2, 3, 0b1011_0100, 0b1111_0100]
        );
        let decoded = decode_response(&bytes).unwrap();
        assert_eq!(decoded.response, resp);
        assert_eq!(decoded.overhead_bits, 12 * 8 - 12);
    }

    #[test]
    fn malformed_messages() {
        let p = params();
        assert_eq!(decode_query_matrix(&[], &p), Err(WireError::Truncated));
        assert_eq!(decode_query_matrix(&[0x07], &p), Err(WireError::UnknownFormat(7)));
        let q = QueryMatrix::from_rows(&p, &[[0, 2, 4], [1, 3, 0]]).unwrap();
        let mut bytes = encode_query_matrix(&q);
        bytes.push(0);
        assert_eq!(decode_query_matrix(&bytes, &p), Err(WireError::TrailingBytes(1)));
        let mut dup = encode_query_matrix(&q);
        dup[QUERY_HEADER + 3] = 2; // row 0 becomes [2, 2, 4]
        assert!(matches!(decode_query_matrix(&dup, &p), Err(WireError::Invalid(_))));
        let mut resp = encode_response(&Response::new(1, vec![true], vec![1]).unwrap(), 3);
        *resp.last_mut().unwrap() |= 1;
        assert_eq!(decode_response(&resp), Err(WireError::NonZeroPadding));
        assert_eq!(decode_response(&resp[..10]), Err(WireError::Truncated));
    }

    proptest! {
        #[test]
        fn responses_round_trip(
            width in 1u8..=16,
            alpha in 1usize..5,
            present in proptest::collection::vec(any::<bool>(), 1..8),
            seed in any::<u64>(),
        ) {
            let count = alpha * present.iter().filter(|&&p| p).count();
            let mask = ((1u32 << width) - 1) as u64;
            let symbols: Vec<u16> = (0..count as u64)
                .map(|i| ((seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(i as u32 % 64) ^ i) & mask) as u16)
                .collect();
            let resp = Response::new(alpha, present, symbols).unwrap();
            let bytes = encode_response(&resp, width);
            let back = decode_response(&bytes).unwrap();
            prop_assert_eq!(&back.response, &resp);
            prop_assert_eq!(back.overhead_bits + (count * width as usize) as u64, bytes.len() as u64 * 8);
        }
    }
}
