//! Exact distinct counting of integer rows.
//!
//! Rows whose entries fit a known bound are packed losslessly into a `u128`;
//! anything wider falls back to boxed slices. Both are kept sorted and unique so
//! partial results from parallel chunks merge by set union in any order.

#[derive(Debug, Clone, Copy)]
pub(crate) struct Packer {
    bits: u32,
    offset: i64,
}

impl Packer {
    /// A packer for `width` entries in `[-max_abs, max_abs]`, if they fit in 128 bits.
    pub(crate) fn new(width: usize, max_abs: u64) -> Option<Self> {
        if max_abs >= (1u64 << 62) {
            return None;
        }
        let span = 2 * max_abs + 1;
        let bits = 64 - span.leading_zeros();
        (bits as usize * width <= 128).then_some(Self {
            bits,
            offset: max_abs as i64,
        })
    }

    fn pack(&self, row: &[i64]) -> u128 {
        row.iter().fold(0u128, |acc, &v| {
            (acc << self.bits) | (v + self.offset) as u64 as u128
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) enum KeySet {
    Packed(Vec<u128>),
    Wide(Vec<Box<[i64]>>),
}

impl KeySet {
    pub(crate) fn empty(packed: bool) -> Self {
        if packed {
            KeySet::Packed(Vec::new())
        } else {
            KeySet::Wide(Vec::new())
        }
    }

    /// Builds the set of distinct rows of the row-major `rows` (row length `width`).
    pub(crate) fn from_rows(rows: &[i64], width: usize, packer: Option<Packer>) -> Self {
        match packer {
            Some(p) => {
                let mut keys: Vec<u128> = rows.chunks_exact(width).map(|r| p.pack(r)).collect();
                keys.sort_unstable();
                keys.dedup();
                KeySet::Packed(keys)
            }
            None => {
                let mut keys: Vec<Box<[i64]>> = rows
                    .chunks_exact(width)
                    .map(|r| r.to_vec().into_boxed_slice())
                    .collect();
                keys.sort_unstable();
                keys.dedup();
                KeySet::Wide(keys)
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            KeySet::Packed(v) => v.len(),
            KeySet::Wide(v) => v.len(),
        }
    }

    pub(crate) fn union(self, other: Self) -> Self {
        match (self, other) {
            (KeySet::Packed(a), KeySet::Packed(b)) => KeySet::Packed(merge_unique(a, b)),
            (KeySet::Wide(a), KeySet::Wide(b)) => KeySet::Wide(merge_unique(a, b)),
            _ => unreachable!("key sets of one count share a representation"),
        }
    }
}

fn merge_unique<T: Ord>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
    if a.is_empty() {
        return b;
    }
    if b.is_empty() {
        return a;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => match x.cmp(y) {
                std::cmp::Ordering::Less => a.next(),
                std::cmp::Ordering::Greater => b.next(),
                std::cmp::Ordering::Equal => {
                    b.next();
                    a.next()
                }
            },
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (None, None) => break,
        };
        out.extend(next);
    }
    out
}

/// Distinct rows of a row-major `i64` table.
pub(crate) fn count_distinct_rows(rows: &[i64], width: usize) -> usize {
    if width == 0 || rows.is_empty() {
        return 0;
    }
    let max_abs = rows.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    KeySet::from_rows(rows, width, Packer::new(width, max_abs)).len()
}
