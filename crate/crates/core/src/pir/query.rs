use rand::Rng;

use super::{PirError, SystemParams};

fn check_rows(m: usize, s: usize, zone: usize, entries: &[usize]) -> Result<(), PirError> {
    if entries.len() != m * s {
        return Err(PirError::MalformedQuery(format!(
            "expected {m}x{s} entries, got {}",
            entries.len()
        )));
    }
    for (r, row) in entries.chunks(s.max(1)).enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v >= zone {
                return Err(PirError::MalformedQuery(format!(
                    "entry ({r}, {c}) = {v} outside [0, {zone})"
                )));
            }
            if row[..c].contains(&v) {
                return Err(PirError::MalformedQuery(format!(
                    "row {r} repeats index {v}"
                )));
            }
        }
    }
    Ok(())
}

/// The client's secret: an `M x S` matrix over `[0, B+S)` with pairwise
/// distinct entries in every row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QueryMatrix {
    m: usize,
    s: usize,
    zone: usize,
    entries: Vec<usize>,
}

impl QueryMatrix {
    pub fn from_rows<R: AsRef<[usize]>>(params: &SystemParams, rows: &[R]) -> Result<Self, PirError> {
        if rows.len() != params.m() {
            return Err(PirError::MalformedQuery(format!(
                "expected {} rows, got {}",
                params.m(),
                rows.len()
            )));
        }
        let entries: Vec<usize> = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::from_entries(params, entries)
    }

    pub fn from_entries(params: &SystemParams, entries: Vec<usize>) -> Result<Self, PirError> {
        check_rows(params.m(), params.s(), params.zone(), &entries)?;
        Ok(Self {
            m: params.m(),
            s: params.s(),
            zone: params.zone(),
            entries,
        })
    }

    /// Uniform sample from the query space: each row is an independent
    /// ordered `S`-subset of `[0, B+S)` drawn by partial Fisher-Yates.
    pub fn sample<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> Self {
        let (m, s, zone) = (params.m(), params.s(), params.zone());
        let mut entries = Vec::with_capacity(m * s);
        let mut pool: Vec<usize> = (0..zone).collect();
        for _ in 0..m {
            for t in 0..s {
                let pick = rng.random_range(t..zone);
                pool.swap(t, pick);
            }
            entries.extend_from_slice(&pool[..s]);
        }
        Self { m, s, zone, entries }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.s
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.entries[r * self.s + c]
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.entries[r * self.s..(r + 1) * self.s]
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// The query for server `server` when retrieving file `theta`: row
    /// `theta` shifted by `+server` modulo `B+S`, other rows unchanged.
    pub fn server_query(
        &self,
        theta: usize,
        server: usize,
        params: &SystemParams,
    ) -> Result<ServerQuery, PirError> {
        if theta >= self.m {
            return Err(PirError::FileOutOfRange { theta, m: self.m });
        }
        if server >= params.n() {
            return Err(PirError::ServerOutOfRange {
                server,
                n: params.n(),
            });
        }
        let mut entries = self.entries.clone();
        for v in &mut entries[theta * self.s..(theta + 1) * self.s] {
            *v = (*v + server) % self.zone;
        }
        Ok(ServerQuery {
            server,
            m: self.m,
            s: self.s,
            zone: self.zone,
            entries,
        })
    }

    /// Every member of the query space, in lexicographic row order.
    pub fn enumerate(params: &SystemParams) -> OmegaIter {
        OmegaIter::new(params)
    }
}

/// What server `server` receives. Indistinguishable from a fresh
/// [`QueryMatrix`] sample.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ServerQuery {
    server: usize,
    m: usize,
    s: usize,
    zone: usize,
    entries: Vec<usize>,
}

impl ServerQuery {
    /// A query as received off the wire by `server`; validated against the
    /// query space.
    pub fn from_entries(
        params: &SystemParams,
        server: usize,
        entries: Vec<usize>,
    ) -> Result<Self, PirError> {
        if server >= params.n() {
            return Err(PirError::ServerOutOfRange {
                server,
                n: params.n(),
            });
        }
        check_rows(params.m(), params.s(), params.zone(), &entries)?;
        Ok(Self {
            server,
            m: params.m(),
            s: params.s(),
            zone: params.zone(),
            entries,
        })
    }

    pub fn server(&self) -> usize {
        self.server
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.s
    }

    pub fn get(&self, r: usize, c: usize) -> usize {
        self.entries[r * self.s + c]
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.entries[r * self.s..(r + 1) * self.s]
    }

    pub fn column(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.m).map(move |r| self.get(r, c))
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    /// Shape and row-distinctness check against `params`.
    pub fn validate(&self, params: &SystemParams) -> Result<(), PirError> {
        if (self.m, self.s, self.zone) != (params.m(), params.s(), params.zone()) {
            return Err(PirError::MalformedQuery(format!(
                "query is {}x{} over [0, {}), system expects {}x{} over [0, {})",
                self.m,
                self.s,
                self.zone,
                params.m(),
                params.s(),
                params.zone()
            )));
        }
        check_rows(self.m, self.s, self.zone, &self.entries)
    }

    /// The same entries viewed as a bare query matrix.
    pub fn as_query_matrix(&self) -> QueryMatrix {
        QueryMatrix {
            m: self.m,
            s: self.s,
            zone: self.zone,
            entries: self.entries.clone(),
        }
    }
}

/// Iterator over the whole query space.
#[derive(Debug, Clone)]
pub struct OmegaIter {
    m: usize,
    s: usize,
    zone: usize,
    row_choices: Vec<Vec<usize>>,
    digits: Vec<usize>,
    done: bool,
}

impl OmegaIter {
    fn new(params: &SystemParams) -> Self {
        let (s, zone) = (params.s(), params.zone());
        let mut row_choices = Vec::new();
        let mut current = Vec::with_capacity(s);
        ordered_tuples(zone, s, &mut current, &mut row_choices);
        Self {
            m: params.m(),
            s,
            zone,
            done: row_choices.is_empty(),
            row_choices,
            digits: vec![0; params.m()],
        }
    }
}

fn ordered_tuples(zone: usize, s: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if current.len() == s {
        out.push(current.clone());
        return;
    }
    for v in 0..zone {
        if !current.contains(&v) {
            current.push(v);
            ordered_tuples(zone, s, current, out);
            current.pop();
        }
    }
}

impl Iterator for OmegaIter {
    type Item = QueryMatrix;

    fn next(&mut self) -> Option<QueryMatrix> {
        if self.done {
            return None;
        }
        let entries = self
            .digits
            .iter()
            .flat_map(|&d| self.row_choices[d].iter().copied())
            .collect();
        let item = QueryMatrix {
            m: self.m,
            s: self.s,
            zone: self.zone,
            entries,
        };
        // odometer increment, last row fastest
        let mut pos = self.m;
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.digits[pos] += 1;
            if self.digits[pos] < self.row_choices.len() {
                break;
            }
            self.digits[pos] = 0;
        }
        Some(item)
    }
}
