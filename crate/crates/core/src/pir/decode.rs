use crate::field::add_slice;

use super::response::prunable_columns;
use super::{FileMatrix, PirError, QueryMatrix, Response, SystemParams};

/// Which servers play which role for a given query and target file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodePlan {
    /// Per query column `j`: servers whose shifted index lands in a virtual
    /// row, so their block `j` is pure interference.
    pub interference_servers: Vec<Vec<usize>>,
    /// Per sub-stripe `t`: `(server, column)` pairs whose de-interfered block
    /// is the code symbol `Y^theta_{t, server}`.
    pub sub_stripe_sources: Vec<Vec<(usize, usize)>>,
}

impl DecodePlan {
    pub fn new(q: &QueryMatrix, theta: usize, params: &SystemParams) -> Result<Self, PirError> {
        if theta >= q.rows() {
            return Err(PirError::FileOutOfRange { theta, m: q.rows() });
        }
        let (n, b, zone) = (params.n(), params.b(), params.zone());
        let mut interference_servers = vec![Vec::new(); q.cols()];
        let mut sub_stripe_sources = vec![Vec::new(); b];
        for (j, zs) in interference_servers.iter_mut().enumerate() {
            let base = q.get(theta, j);
            for i in 0..n {
                let row = (base + i) % zone;
                if row >= b {
                    zs.push(i);
                } else {
                    sub_stripe_sources[row].push((i, j));
                }
            }
        }
        Ok(Self {
            interference_servers,
            sub_stripe_sources,
        })
    }
}

/// Recovers file `theta` from all `N` responses to the queries derived from
/// `q`.
///
/// For each column `j` the `K` interference-only blocks determine the whole
/// interference codeword, which is subtracted from the other `N - K` blocks
/// to expose code symbols of file `theta`. Each sub-stripe then has exactly
/// `K` known code symbols and is erasure-decoded.
pub fn decode_file(
    responses: &[Response],
    q: &QueryMatrix,
    theta: usize,
    params: &SystemParams,
) -> Result<FileMatrix, PirError> {
    let (n, k, alpha) = (params.n(), params.k(), params.alpha());
    if responses.len() != n {
        return Err(PirError::ResponseCount {
            expected: n,
            got: responses.len(),
        });
    }
    if (q.rows(), q.cols()) != (params.m(), params.s()) {
        return Err(PirError::MalformedQuery(format!(
            "query is {}x{}, system expects {}x{}",
            q.rows(),
            q.cols(),
            params.m(),
            params.s()
        )));
    }
    for (i, resp) in responses.iter().enumerate() {
        if resp.alpha() != alpha || resp.present().len() != params.s() {
            return Err(PirError::MalformedResponse {
                server: i,
                reason: format!(
                    "expected {} columns of {alpha} symbols, got {} of {}",
                    params.s(),
                    resp.present().len(),
                    resp.alpha()
                ),
            });
        }
        let expected: Vec<bool> = prunable_columns(&q.server_query(theta, i, params)?, params)
            .into_iter()
            .map(|p| !p)
            .collect();
        if resp.present() != expected {
            return Err(PirError::BitmapMismatch { server: i });
        }
    }

    let plan = DecodePlan::new(q, theta, params)?;
    let zero = vec![0u16; alpha];
    let block = |i: usize, j: usize| responses[i].block(j).unwrap_or(&zero);

    // de-interfered blocks, indexed [column][server]
    let mut exposed: Vec<Vec<Option<Vec<u16>>>> = vec![vec![None; n]; params.s()];
    for (j, zs) in plan.interference_servers.iter().enumerate() {
        debug_assert_eq!(zs.len(), k);
        let known: Vec<(usize, &[u16])> = zs.iter().map(|&i| (i, block(i, j))).collect();
        let interference = params.code().reencode_full(&known)?;
        for i in (0..n).filter(|i| !zs.contains(i)) {
            let mut y = block(i, j).to_vec();
            add_slice(&mut y, interference.block(i));
            exposed[j][i] = Some(y);
        }
    }

    let mut stripes = Vec::with_capacity(params.b());
    for sources in &plan.sub_stripe_sources {
        debug_assert_eq!(sources.len(), k);
        let avail: Vec<(usize, &[u16])> = sources
            .iter()
            .map(|&(i, j)| (i, exposed[j][i].as_deref().expect("exposed above")))
            .collect();
        stripes.push(params.code().erasure_decode(&avail)?);
    }
    FileMatrix::from_sub_stripes(params, stripes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{ArrayCode, EvenOdd, StackedReedSolomon};
    use crate::field::FieldSpec;
    use crate::pir::{answer, encode_system};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn params_for(code: Arc<dyn ArrayCode>, m: usize) -> SystemParams {
        SystemParams::for_code(code, m).unwrap()
    }

    fn rs(n: usize, k: usize, alpha: usize) -> Arc<dyn ArrayCode> {
        Arc::new(StackedReedSolomon::new(n, k, alpha, FieldSpec::exceeding(n).unwrap()).unwrap())
    }

    fn respond(store: &crate::pir::EncodedStore, q: &QueryMatrix, theta: usize, p: &SystemParams) -> Vec<Response> {
        (0..p.n())
            .map(|i| answer(store.shard(i), &q.server_query(theta, i, p).unwrap(), p).unwrap())
            .collect()
    }

    #[test]
    fn worked_example_plan() {
        let p = params_for(rs(5, 3, 1), 2);
        let q = QueryMatrix::from_rows(&p, &[[0, 2, 4], [1, 3, 0]]).unwrap();
        let plan = DecodePlan::new(&q, 0, &p).unwrap();
        // column 0: shifted indices 0,1,2,3,4 -> servers 2,3,4 hit rows >= B
        assert_eq!(plan.interference_servers[0], vec![2, 3, 4]);
        assert_eq!(plan.interference_servers[1], vec![0, 1, 2]);
        assert_eq!(plan.interference_servers[2], vec![0, 3, 4]);
        // Y^0_{0,0}, Y^0_{0,3}, Y^0_{0,1} and Y^0_{1,1}, Y^0_{1,4}, Y^0_{1,2}
        let mut t0: Vec<_> = plan.sub_stripe_sources[0].iter().map(|&(i, _)| i).collect();
        let mut t1: Vec<_> = plan.sub_stripe_sources[1].iter().map(|&(i, _)| i).collect();
        t0.sort();
        t1.sort();
        assert_eq!(t0, vec![0, 1, 3]);
        assert_eq!(t1, vec![1, 2, 4]);
    }

    #[test]
    fn worked_example_stage_one_column_zero() {
        let p = params_for(rs(5, 3, 2), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let files = [FileMatrix::random(&p, &mut rng), FileMatrix::random(&p, &mut rng)];
        let store = encode_system(&files, &p).unwrap();
        let q = QueryMatrix::from_rows(&p, &[[0, 2, 4], [1, 3, 0]]).unwrap();
        let responses = respond(&store, &q, 0, &p);
        // servers 2..5 return Y^1_{1,i}; these determine Y^1_{1,0} and Y^1_{1,1}
        let known: Vec<_> = (2..5).map(|i| (i, responses[i].block(0).unwrap())).collect();
        let interference = p.code().reencode_full(&known).unwrap();
        assert_eq!(interference.block(0), store.shard(0).block(1, 1));
        assert_eq!(interference.block(1), store.shard(1).block(1, 1));
        let y00: Vec<u16> = responses[0]
            .block(0)
            .unwrap()
            .iter()
            .zip(interference.block(0))
            .map(|(a, b)| a ^ b)
            .collect();
        assert_eq!(&y00[..], store.shard(0).block(0, 0));
        let file = decode_file(&responses, &q, 0, &p).unwrap();
        assert_eq!(file, files[0]);
    }

    #[test]
    fn round_trip_every_query_small_system() {
        for code in [rs(4, 2, 2), rs(5, 3, 1), Arc::new(EvenOdd::new(2, 3).unwrap()) as Arc<dyn ArrayCode>] {
            let p = params_for(code, 2);
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            let files = [FileMatrix::random(&p, &mut rng), FileMatrix::random(&p, &mut rng)];
            let store = encode_system(&files, &p).unwrap();
            for q in QueryMatrix::enumerate(&p) {
                for (theta, want) in files.iter().enumerate() {
                    let responses = respond(&store, &q, theta, &p);
                    assert_eq!(&decode_file(&responses, &q, theta, &p).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn single_file_reduces_to_erasure_decoding() {
        let p = params_for(rs(7, 3, 2), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let file = FileMatrix::random(&p, &mut rng);
        let store = encode_system(std::slice::from_ref(&file), &p).unwrap();
        for _ in 0..20 {
            let q = QueryMatrix::sample(&p, &mut rng);
            let responses = respond(&store, &q, 0, &p);
            // interference-only positions carry nothing
            let plan = DecodePlan::new(&q, 0, &p).unwrap();
            for (j, zs) in plan.interference_servers.iter().enumerate() {
                for &i in zs {
                    assert_eq!(responses[i].block(j), None);
                }
            }
            assert_eq!(decode_file(&responses, &q, 0, &p).unwrap(), file);
        }
    }

    #[test]
    fn plan_sets_have_k_members() {
        for (n, k) in [(4, 2), (5, 2), (5, 3), (6, 4), (7, 3), (9, 6)] {
            let p = params_for(rs(n, k, 1), 2);
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..50 {
                let q = QueryMatrix::sample(&p, &mut rng);
                for theta in 0..2 {
                    let plan = DecodePlan::new(&q, theta, &p).unwrap();
                    assert!(plan.interference_servers.iter().all(|z| z.len() == k));
                    assert!(plan.sub_stripe_sources.iter().all(|u| u.len() == k));
                }
            }
        }
    }

    #[test]
    fn detects_tampering() {
        let p = params_for(rs(5, 3, 1), 2);
        let store = encode_system(&[FileMatrix::zeros(&p), FileMatrix::zeros(&p)], &p).unwrap();
        let q = QueryMatrix::from_rows(&p, &[[0, 2, 4], [1, 3, 0]]).unwrap();
        let mut responses = respond(&store, &q, 0, &p);
        assert!(matches!(
            decode_file(&responses[..4], &q, 0, &p),
            Err(PirError::ResponseCount { expected: 5, got: 4 })
        ));
        responses[0] = Response::new(1, vec![true, true, true], vec![0, 0, 0]).unwrap();
        assert_eq!(
            decode_file(&responses, &q, 0, &p),
            Err(PirError::BitmapMismatch { server: 0 })
        );
        responses[0] = Response::new(2, vec![true], vec![0, 0]).unwrap();
        assert!(matches!(
            decode_file(&responses, &q, 0, &p),
            Err(PirError::MalformedResponse { server: 0, .. })
        ));
    }
}
